#include "qpp/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <variant>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qpp/correlation.hpp"
#include "qpp/error.hpp"
#include "qpp/parallel.hpp"

namespace qpp {

namespace {

constexpr double kDegenerateNormalizer = 1e-12;

void require_non_empty(const Query& query) {
  if (query.empty()) throw UndefinedResult(fmt::format("query '{}' has no terms after tokenization", query.query_id));
}

template <typename TermScore>
double aggregate_distinct(const Query& query, Aggregator agg, TermScore&& per_term) {
  require_non_empty(query);
  double sum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [term, count] : query.qtf) {
    const double v = per_term(term);
    sum += v;
    best = std::max(best, v);
  }
  switch (agg) {
  case Aggregator::sum:
    return sum;
  case Aggregator::avg:
    return sum / static_cast<double>(query.qtf.size());
  case Aggregator::max:
    return best;
  }
  return sum;
}

double require_normalizer(double collection_score) {
  const double norm = std::abs(collection_score);
  if (norm < kDegenerateNormalizer) {
    throw UndefinedResult(fmt::format("degenerate collection score normalizer |{}|", collection_score));
  }
  return norm;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Scores consumed by NQC/WIG/SMV: recomputed Dirichlet log-likelihoods by default.
std::vector<double> topk_scores(const Query& query, const RankedList& list, const CorpusStats& stats,
                                const PostParams& params) {
  if (params.scores == ScoreSource::run) {
    if (list.empty()) throw UndefinedResult(fmt::format("empty ranked list for query '{}'", list.query_id));
    const std::size_t n = std::min(params.k, list.size());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = list.entries[i].score;
    return out;
  }
  const auto top = rescore_topk(query, list, stats, params.mu, params.k);
  std::vector<double> out(top.size());
  std::transform(top.begin(), top.end(), out.begin(), [](const ScoredDoc& d) { return d.score; });
  return out;
}

double uef_with(const PredictorSpec& base, const Query& query, const RankedList& list, const CorpusStats& stats,
                const PostParams& params) {
  if (params.k < 2) throw std::invalid_argument("UEF requires k >= 2");
  const double base_score = predict(base, query, &list, stats);
  const auto top = rescore_topk(query, list, stats, params.mu, params.k);
  if (top.size() < 2) {
    throw UndefinedResult(fmt::format("UEF needs at least two ranked documents for query '{}'", query.query_id));
  }
  std::vector<double> original = topk_scores(query, list, stats, params);
  std::vector<std::string> ids(top.size());
  std::transform(top.begin(), top.end(), ids.begin(), [](const ScoredDoc& d) { return d.doc_id; });

  const LanguageModel rm = rm1(query, list, stats, params.mu, params.k, params.n_terms);
  const auto reranked = rerank_by_rm(rm, ids, stats, params.mu);
  std::unordered_map<std::string_view, double> by_doc;
  for (const auto& d : reranked) by_doc.emplace(d.doc_id, d.score);
  std::vector<double> aligned(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) aligned[i] = by_doc.at(ids[i]);
  return uef_from_scores(original, aligned, base_score);
}

} // namespace

PredictorFamily PredictorSpec::family() const noexcept {
  switch (kind) {
  case PredictorKind::idf:
  case PredictorKind::ictf:
  case PredictorKind::scq:
  case PredictorKind::var:
  case PredictorKind::scs:
    return PredictorFamily::pre;
  default:
    return PredictorFamily::post;
  }
}

void PredictorSpec::validate() const {
  const auto fail = [&](std::string_view why) {
    throw std::invalid_argument(fmt::format("predictor '{}': {}", name, why));
  };
  if (name.empty()) throw std::invalid_argument("predictor spec without a name");
  if (family() == PredictorFamily::pre) {
    if (!aggregator) fail("pre-retrieval predictors need an aggregator");
    if (kind == PredictorKind::scs && *aggregator != Aggregator::sum) fail("SCS only supports sum aggregation");
  } else {
    if (aggregator) fail("post-retrieval predictors take no aggregator");
    if (params.k < 1) fail("k must be >= 1");
    if (params.n_terms < 1) fail("n_terms must be >= 1");
    if (!(params.mu > 0.0)) fail("mu must be > 0");
  }
  if (kind == PredictorKind::uef) {
    if (!base) fail("UEF needs a base predictor");
    switch (base->kind) {
    case PredictorKind::clarity:
    case PredictorKind::nqc:
    case PredictorKind::wig:
    case PredictorKind::smv:
      break;
    default:
      fail("UEF base must be one of Clarity, NQC, WIG, SMV");
    }
    if (params.k < 2) fail("UEF requires k >= 2");
    base->validate();
  } else if (base) {
    fail("only UEF takes a base predictor");
  }
}

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
  case PredictorKind::idf: return "IDF";
  case PredictorKind::ictf: return "ICTF";
  case PredictorKind::scq: return "SCQ";
  case PredictorKind::var: return "VAR";
  case PredictorKind::scs: return "SCS";
  case PredictorKind::clarity: return "Clarity";
  case PredictorKind::nqc: return "NQC";
  case PredictorKind::wig: return "WIG";
  case PredictorKind::smv: return "SMV";
  case PredictorKind::uef: return "UEF";
  }
  return "?";
}

std::string_view to_string(Aggregator agg) {
  switch (agg) {
  case Aggregator::sum: return "sum";
  case Aggregator::avg: return "avg";
  case Aggregator::max: return "max";
  }
  return "?";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto kind : {PredictorKind::idf, PredictorKind::ictf, PredictorKind::scq, PredictorKind::var,
                    PredictorKind::scs, PredictorKind::clarity, PredictorKind::nqc, PredictorKind::wig,
                    PredictorKind::smv, PredictorKind::uef}) {
    std::string candidate(to_string(kind));
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (candidate == lowered) return kind;
  }
  throw std::invalid_argument(fmt::format("unknown predictor '{}'", name));
}

Aggregator parse_aggregator(std::string_view name) {
  if (name == "sum") return Aggregator::sum;
  if (name == "avg" || name == "mean") return Aggregator::avg;
  if (name == "max") return Aggregator::max;
  throw std::invalid_argument(fmt::format("unknown aggregator '{}'", name));
}

PredictorSpec PredictorSpec::pre(PredictorKind kind, Aggregator agg, std::string name) {
  PredictorSpec spec;
  spec.kind = kind;
  spec.aggregator = agg;
  spec.name = name.empty() ? fmt::format("{}-{}", to_string(kind), to_string(agg)) : std::move(name);
  return spec;
}

PredictorSpec PredictorSpec::post(PredictorKind kind, PostParams params, std::string name) {
  PredictorSpec spec;
  spec.kind = kind;
  spec.params = params;
  spec.name = name.empty() ? std::string(to_string(kind)) : std::move(name);
  return spec;
}

PredictorSpec PredictorSpec::uef(PredictorSpec base, PostParams params, std::string name) {
  PredictorSpec spec;
  spec.kind = PredictorKind::uef;
  spec.params = params;
  spec.name = name.empty() ? fmt::format("UEF-{}", base.name) : std::move(name);
  spec.base = std::make_shared<const PredictorSpec>(std::move(base));
  return spec;
}

PostParams default_post_params(PredictorKind kind) {
  PostParams p;
  p.k = kind == PredictorKind::wig ? 5 : 100;
  return p;
}

std::vector<PredictorSpec> default_roster() {
  std::vector<PredictorSpec> roster;
  for (auto kind : {PredictorKind::idf, PredictorKind::ictf, PredictorKind::scq, PredictorKind::var}) {
    roster.push_back(PredictorSpec::pre(kind, Aggregator::avg));
    roster.push_back(PredictorSpec::pre(kind, Aggregator::max));
  }
  roster.push_back(PredictorSpec::pre(PredictorKind::scs, Aggregator::sum, "SCS"));
  for (auto kind : {PredictorKind::clarity, PredictorKind::nqc, PredictorKind::smv, PredictorKind::wig}) {
    roster.push_back(PredictorSpec::post(kind, default_post_params(kind)));
  }
  for (auto kind : {PredictorKind::clarity, PredictorKind::nqc, PredictorKind::smv, PredictorKind::wig}) {
    roster.push_back(PredictorSpec::uef(PredictorSpec::post(kind, default_post_params(kind)),
                                        default_post_params(PredictorKind::uef)));
  }
  return roster;
}

double term_idf(const CorpusStats& stats, std::string_view term, IdfVariant variant) {
  const auto ts = stats.term_stats(term);
  const double n = static_cast<double>(stats.num_docs());
  if (variant == IdfVariant::classic) {
    if (stats.num_docs() == 0) throw UndefinedResult("classic IDF undefined on an empty corpus");
    const double df = ts ? static_cast<double>(ts->df) : 1.0;
    return std::log(n / df);
  }
  const double df = ts ? static_cast<double>(ts->df) : 0.0;
  return std::log((n + 1.0) / (df + 0.5));
}

double term_var(const CorpusStats& stats, std::string_view term, IdfVariant variant) {
  const auto hist = stats.tf_histogram(term);
  const auto ts = stats.term_stats(term);
  if (!ts || ts->df <= 1) return 0.0;
  const double idf = term_idf(stats, term, variant);
  const double df = static_cast<double>(ts->df);
  double mean = 0.0;
  for (const auto& b : hist) mean += static_cast<double>(b.docs) * (1.0 + std::log(static_cast<double>(b.tf))) * idf;
  mean /= df;
  double var = 0.0;
  for (const auto& b : hist) {
    const double d = (1.0 + std::log(static_cast<double>(b.tf))) * idf - mean;
    var += static_cast<double>(b.docs) * d * d;
  }
  return var / df;
}

double idf_agg(const Query& query, const CorpusStats& stats, Aggregator agg, IdfVariant variant) {
  return aggregate_distinct(query, agg, [&](std::string_view t) { return term_idf(stats, t, variant); });
}

double ictf_agg(const Query& query, const CorpusStats& stats, Aggregator agg) {
  return aggregate_distinct(query, agg, [&](std::string_view t) { return -std::log(collection_prob(stats, t)); });
}

double scq_agg(const Query& query, const CorpusStats& stats, Aggregator agg) {
  const double n = static_cast<double>(stats.num_docs());
  return aggregate_distinct(query, agg, [&](std::string_view t) {
    const auto ts = stats.term_stats(t);
    if (!ts) return 0.0;
    return (1.0 + std::log(static_cast<double>(ts->cf))) * std::log(1.0 + n / static_cast<double>(ts->df));
  });
}

double var_agg(const Query& query, const CorpusStats& stats, Aggregator agg, IdfVariant variant) {
  return aggregate_distinct(query, agg, [&](std::string_view t) { return term_var(stats, t, variant); });
}

double scs(const Query& query, const CorpusStats& stats) {
  require_non_empty(query);
  const double len = static_cast<double>(query.length());
  double score = 0.0;
  for (const auto& [term, count] : query.qtf) {
    const double pq = static_cast<double>(count) / len;
    score += pq * std::log(pq / collection_prob(stats, term));
  }
  return score;
}

double clarity_from_model(const LanguageModel& rm, const CorpusStats& stats) {
  double kl = 0.0;
  for (const auto& [term, p] : rm.terms) kl += p * std::log(p / collection_prob(stats, term));
  return kl;
}

double clarity(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k,
               std::size_t n_terms, double mu) {
  require_non_empty(query);
  return clarity_from_model(rm1(query, list, stats, mu, k, n_terms), stats);
}

double nqc_from_scores(std::span<const double> scores, double collection_score) {
  if (scores.size() < 2) throw UndefinedResult("NQC needs at least two scores");
  const double norm = require_normalizer(collection_score);
  const double mean = mean_of(scores);
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scores.size());
  return std::sqrt(var) / norm;
}

double wig_from_scores(std::span<const double> scores, double collection_score, std::size_t query_length) {
  if (scores.empty()) throw UndefinedResult("WIG needs at least one score");
  if (query_length == 0) throw UndefinedResult("WIG undefined for an empty query");
  double sum = 0.0;
  for (double s : scores) sum += s - collection_score;
  return sum / static_cast<double>(scores.size()) / std::sqrt(static_cast<double>(query_length));
}

double smv_from_positive(std::span<const double> positive, double collection_score) {
  if (positive.empty()) throw UndefinedResult("SMV needs at least one score");
  const double norm = require_normalizer(collection_score);
  const double mean = mean_of(positive);
  double sum = 0.0;
  for (double s : positive) {
    if (!(s > 0.0)) throw UndefinedResult("SMV needs strictly positive scores");
    sum += s * std::abs(std::log(s / mean));
  }
  return sum / static_cast<double>(positive.size()) / norm;
}

double smv_from_scores(std::span<const double> scores, double collection_score, SmvPositivity positivity) {
  if (scores.empty()) throw UndefinedResult("SMV needs at least one score");
  std::vector<double> positive(scores.size());
  if (positivity == SmvPositivity::shift) {
    const double lowest = *std::min_element(scores.begin(), scores.end());
    std::transform(scores.begin(), scores.end(), positive.begin(),
                   [&](double s) { return s - lowest + kSmvShiftEpsilon; });
  } else {
    std::transform(scores.begin(), scores.end(), positive.begin(), [](double s) { return std::exp(s); });
  }
  return smv_from_positive(positive, collection_score);
}

double uef_from_scores(std::span<const double> original, std::span<const double> reranked, double base_score) {
  if (original.size() < 2) throw UndefinedResult("UEF needs at least two documents");
  return pearson(original, reranked) * base_score;
}

double nqc(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k, double mu) {
  PostParams p;
  p.k = k;
  p.mu = mu;
  return nqc_from_scores(topk_scores(query, list, stats, p), collection_loglik(query, stats));
}

double wig(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k, double mu) {
  require_non_empty(query);
  PostParams p;
  p.k = k;
  p.mu = mu;
  return wig_from_scores(topk_scores(query, list, stats, p), collection_loglik(query, stats), query.length());
}

double smv(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k, double mu,
           SmvPositivity positivity) {
  PostParams p;
  p.k = k;
  p.mu = mu;
  return smv_from_scores(topk_scores(query, list, stats, p), collection_loglik(query, stats), positivity);
}

double uef(const PredictorSpec& base, const Query& query, const RankedList& list, const CorpusStats& stats,
           std::size_t k, std::size_t n_terms, double mu) {
  PostParams p;
  p.k = k;
  p.n_terms = n_terms;
  p.mu = mu;
  return uef_with(base, query, list, stats, p);
}

double predict(const PredictorSpec& spec, const Query& query, const RankedList* list, const CorpusStats& stats) {
  if (spec.family() == PredictorFamily::pre) {
    const Aggregator agg = spec.aggregator.value_or(Aggregator::avg);
    switch (spec.kind) {
    case PredictorKind::idf: return idf_agg(query, stats, agg, spec.idf_variant);
    case PredictorKind::ictf: return ictf_agg(query, stats, agg);
    case PredictorKind::scq: return scq_agg(query, stats, agg);
    case PredictorKind::var: return var_agg(query, stats, agg, spec.idf_variant);
    case PredictorKind::scs: return scs(query, stats);
    default: break;
    }
  }
  if (list == nullptr) {
    throw std::invalid_argument(fmt::format("predictor '{}' needs a ranked list", spec.name));
  }
  require_non_empty(query);
  const PostParams& p = spec.params;
  switch (spec.kind) {
  case PredictorKind::clarity:
    return clarity(query, *list, stats, p.k, p.n_terms, p.mu);
  case PredictorKind::nqc:
    return nqc_from_scores(topk_scores(query, *list, stats, p), collection_loglik(query, stats));
  case PredictorKind::wig:
    return wig_from_scores(topk_scores(query, *list, stats, p), collection_loglik(query, stats), query.length());
  case PredictorKind::smv:
    return smv_from_scores(topk_scores(query, *list, stats, p), collection_loglik(query, stats), p.smv);
  case PredictorKind::uef:
    return uef_with(*spec.base, query, *list, stats, p);
  default:
    break;
  }
  throw std::logic_error("unhandled predictor kind");
}

PredictionRun run_predictor(const PredictorSpec& spec, const TopicSet& topics, std::span<const Run> runs,
                            const CorpusStats& stats, unsigned threads) {
  spec.validate();
  const auto ids = topics.ids();
  using Cell = std::variant<double, std::string>;
  PredictionRun out;

  const auto score_cell = [&](const Query& query, const RankedList* list) -> Cell {
    try {
      return predict(spec, query, list, stats);
    } catch (const UndefinedResult& e) {
      return std::string(e.what());
    }
  };
  const auto record = [&](const std::string& system, const std::string& qid, const Cell& cell) {
    if (const auto* v = std::get_if<double>(&cell)) {
      out.table.insert(spec.name, system, qid, *v);
    } else {
      out.missing.push_back(fmt::format("{}/{}/{}: {}", spec.name, system, qid, std::get<std::string>(cell)));
    }
  };

  if (spec.family() == PredictorFamily::pre) {
    std::vector<Cell> cells(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) { cells[i] = score_cell(topics.queries.find(ids[i])->second, nullptr); });
    for (const auto& run : runs) {
      for (std::size_t i = 0; i < ids.size(); ++i) record(run.name, ids[i], cells[i]);
    }
  } else {
    std::vector<Cell> cells(runs.size() * ids.size());
    parallel_for(cells.size(), threads, [&](std::size_t c) {
      const Run& run = runs[c / ids.size()];
      const std::string& qid = ids[c % ids.size()];
      const RankedList* list = run.find(qid);
      if (list == nullptr || list->empty()) {
        cells[c] = std::string("no ranked list");
        return;
      }
      cells[c] = score_cell(topics.queries.find(qid)->second, list);
    });
    for (std::size_t c = 0; c < cells.size(); ++c) record(runs[c / ids.size()].name, ids[c % ids.size()], cells[c]);
  }

  if (!out.missing.empty()) {
    spdlog::warn("{}: {} of {} cells could not be scored (first: {})", spec.name, out.missing.size(),
                 runs.size() * ids.size(), out.missing.front());
  }
  return out;
}

} // namespace qpp
