#include "qpp/lm_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "qpp/error.hpp"

namespace qpp {

namespace {

void require_positive_mu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument(fmt::format("Dirichlet mu must be > 0 (got {})", mu));
}

const DocVector& require_vector(const CorpusStats& stats, std::string_view doc_id) {
  const DocVector* v = stats.doc_vector(doc_id);
  if (v == nullptr) {
    throw InputError(fmt::format("no document vector stored for doc_id '{}'", doc_id));
  }
  return *v;
}

} // namespace

Query Query::from_tokens(std::string query_id, std::vector<std::string> tokens) {
  Query q;
  q.query_id = std::move(query_id);
  for (const auto& t : tokens) q.qtf[t] += 1;
  q.tokens = std::move(tokens);
  return q;
}

double LanguageModel::probability(std::string_view term) const {
  const auto it = std::lower_bound(terms.begin(), terms.end(), term,
                                   [](const auto& e, std::string_view t) { return e.first < t; });
  return (it != terms.end() && it->first == term) ? it->second : 0.0;
}

double LanguageModel::mass() const {
  double sum = 0.0;
  for (const auto& [term, p] : terms) sum += p;
  return sum;
}

double collection_prob(const CorpusStats& stats, std::string_view term) {
  const auto total = stats.total_tokens();
  if (total == 0) throw InputError("collection probability undefined on an empty corpus");
  if (const auto ts = stats.term_stats(term)) {
    return static_cast<double>(ts->cf) / static_cast<double>(total);
  }
  return 1.0 / (static_cast<double>(total) + 1.0);
}

double dirichlet_loglik(const Query& query, const DocVector& doc, const CorpusStats& stats, double mu) {
  require_positive_mu(mu);
  const double denom = static_cast<double>(doc.length()) + mu;
  double score = 0.0;
  for (const auto& [term, count] : query.qtf) {
    const double numer = static_cast<double>(doc.tf(term)) + mu * collection_prob(stats, term);
    score += static_cast<double>(count) * std::log(numer / denom);
  }
  return score;
}

double collection_loglik(const Query& query, const CorpusStats& stats) {
  double score = 0.0;
  for (const auto& [term, count] : query.qtf) {
    score += static_cast<double>(count) * std::log(collection_prob(stats, term));
  }
  return score;
}

std::vector<ScoredDoc> rescore_topk(const Query& query, const RankedList& list, const CorpusStats& stats, double mu,
                                    std::size_t k) {
  require_positive_mu(mu);
  if (k == 0) throw std::invalid_argument("rescore_topk: k must be >= 1");
  if (list.empty()) throw UndefinedResult(fmt::format("empty ranked list for query '{}'", list.query_id));
  const std::size_t n = std::min(k, list.size());
  std::vector<ScoredDoc> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = list.entries[i].doc_id;
    out.push_back({id, dirichlet_loglik(query, require_vector(stats, id), stats, mu)});
  }
  return out;
}

LanguageModel rm1(const Query& query, const RankedList& list, const CorpusStats& stats, double mu, std::size_t k,
                  std::size_t n_terms) {
  if (n_terms == 0) throw std::invalid_argument("rm1: n_terms must be >= 1");
  const auto top = rescore_topk(query, list, stats, mu, k);

  // softmax over log-likelihoods
  double max_score = -std::numeric_limits<double>::infinity();
  for (const auto& d : top) max_score = std::max(max_score, d.score);
  std::vector<double> weights(top.size());
  double z = 0.0;
  for (std::size_t i = 0; i < top.size(); ++i) {
    weights[i] = std::exp(top[i].score - max_score);
    z += weights[i];
  }
  for (auto& w : weights) w /= z;

  // P(w|R) = sum_d w_d (tf(w,d) + mu P(w|C)) / (|d| + mu), split into the
  // tf part and the smoothing part shared by every vocabulary term.
  std::map<std::string_view, double> tf_part;
  double smoothing_weight = 0.0;
  for (std::size_t i = 0; i < top.size(); ++i) {
    const DocVector& doc = *stats.doc_vector(top[i].doc_id);
    const double denom = static_cast<double>(doc.length()) + mu;
    smoothing_weight += weights[i] * mu / denom;
    for (const auto& [term, tf] : doc.entries()) {
      tf_part[term] += weights[i] * static_cast<double>(tf) / denom;
    }
  }
  if (tf_part.empty()) {
    throw UndefinedResult(fmt::format("relevance model undefined for query '{}': top-k documents are all empty",
                                      query.query_id));
  }

  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(tf_part.size());
  for (const auto& [term, part] : tf_part) {
    ranked.emplace_back(std::string(term), part + smoothing_weight * collection_prob(stats, term));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  LanguageModel model;
  model.renormalized = ranked.size() > n_terms;
  if (ranked.size() > n_terms) ranked.resize(n_terms);
  double total = 0.0;
  for (const auto& [term, p] : ranked) total += p;
  for (auto& [term, p] : ranked) p /= total;
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  model.terms = std::move(ranked);
  return model;
}

std::vector<ScoredDoc> rerank_by_rm(const LanguageModel& rm, std::span<const std::string> doc_ids,
                                    const CorpusStats& stats, double mu) {
  require_positive_mu(mu);
  if (rm.empty()) throw std::invalid_argument("rerank_by_rm: empty relevance model");
  std::vector<ScoredDoc> out;
  out.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    const DocVector& doc = require_vector(stats, id);
    const double denom = static_cast<double>(doc.length()) + mu;
    double score = 0.0;
    for (const auto& [term, p] : rm.terms) {
      score += p * std::log((static_cast<double>(doc.tf(term)) + mu * collection_prob(stats, term)) / denom);
    }
    out.push_back({id, score});
  }
  std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  return out;
}

} // namespace qpp
