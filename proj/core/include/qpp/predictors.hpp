#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/corpus.hpp"
#include "qpp/lm_scoring.hpp"
#include "qpp/prediction_table.hpp"
#include "qpp/run.hpp"
#include "qpp/topics.hpp"

namespace qpp {

enum class PredictorKind { idf, ictf, scq, var, scs, clarity, nqc, wig, smv, uef };
enum class PredictorFamily { pre, post };
enum class Aggregator { sum, avg, max };

/// Which scores the score-distribution predictors (NQC, WIG, SMV and the
/// original side of UEF) consume.
enum class ScoreSource { language_model, run };

/// How SMV maps log-likelihoods onto positive values.
enum class SmvPositivity { shift, exp };

enum class IdfVariant {
  smoothed, ///< ln((N+1)/(df+0.5))
  classic,  ///< ln(N/df), OOV terms use df = 1
};

inline constexpr double kSmvShiftEpsilon = 1e-6;

struct PostParams {
  std::size_t k = 100;
  double mu = kDefaultMu;
  std::size_t n_terms = 100;
  ScoreSource scores = ScoreSource::language_model;
  SmvPositivity smv = SmvPositivity::shift;

  friend bool operator==(const PostParams&, const PostParams&) = default;
};

struct PredictorSpec {
  std::string name;
  PredictorKind kind = PredictorKind::idf;
  std::optional<Aggregator> aggregator;
  PostParams params;
  IdfVariant idf_variant = IdfVariant::smoothed;
  /// UEF only: the predictor whose score is reweighted.
  std::shared_ptr<const PredictorSpec> base;

  PredictorFamily family() const noexcept;
  /// Throws std::invalid_argument when the spec is inconsistent.
  void validate() const;

  static PredictorSpec pre(PredictorKind kind, Aggregator agg, std::string name = {});
  static PredictorSpec post(PredictorKind kind, PostParams params, std::string name = {});
  static PredictorSpec uef(PredictorSpec base, PostParams params, std::string name = {});
};

std::string_view to_string(PredictorKind kind);
std::string_view to_string(Aggregator agg);
PredictorKind parse_predictor_kind(std::string_view name);
Aggregator parse_aggregator(std::string_view name);

/// Default k per post-retrieval predictor: WIG 5, everything else 100.
PostParams default_post_params(PredictorKind kind);

/// IDF/ICTF/SCQ/VAR with avg and max, SCS with sum, Clarity, NQC, SMV, WIG
/// and the four UEF variants.
std::vector<PredictorSpec> default_roster();

// Pre-retrieval predictors. All aggregate over distinct query terms except
// SCS, which weights by query term frequency.
double idf_agg(const Query& query, const CorpusStats& stats, Aggregator agg, IdfVariant variant = IdfVariant::smoothed);
double ictf_agg(const Query& query, const CorpusStats& stats, Aggregator agg);
double scq_agg(const Query& query, const CorpusStats& stats, Aggregator agg);
double var_agg(const Query& query, const CorpusStats& stats, Aggregator agg, IdfVariant variant = IdfVariant::smoothed);
double scs(const Query& query, const CorpusStats& stats);

/// Per-term building blocks, exposed for testing.
double term_idf(const CorpusStats& stats, std::string_view term, IdfVariant variant = IdfVariant::smoothed);
double term_var(const CorpusStats& stats, std::string_view term, IdfVariant variant = IdfVariant::smoothed);

// Post-retrieval predictors over recomputed language-model scores.
double clarity(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k,
               std::size_t n_terms, double mu);
double nqc(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k, double mu);
double wig(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k, double mu);
double smv(const Query& query, const RankedList& list, const CorpusStats& stats, std::size_t k, double mu,
           SmvPositivity positivity = SmvPositivity::shift);
double uef(const PredictorSpec& base, const Query& query, const RankedList& list, const CorpusStats& stats,
           std::size_t k, std::size_t n_terms, double mu);

// Score-level kernels.
double clarity_from_model(const LanguageModel& rm, const CorpusStats& stats);
double nqc_from_scores(std::span<const double> scores, double collection_score);
double wig_from_scores(std::span<const double> scores, double collection_score, std::size_t query_length);
/// `positive` must already be strictly positive.
double smv_from_positive(std::span<const double> positive, double collection_score);
double smv_from_scores(std::span<const double> scores, double collection_score, SmvPositivity positivity);
/// Pearson(original, reranked) * base_score; vectors are doc-aligned.
double uef_from_scores(std::span<const double> original, std::span<const double> reranked, double base_score);

/// Evaluates any spec. `list` may be null for pre-retrieval specs.
double predict(const PredictorSpec& spec, const Query& query, const RankedList* list, const CorpusStats& stats);

struct PredictionRun {
  PredictionTable table;
  /// "predictor/system/query: reason" for every cell that could not be scored.
  std::vector<std::string> missing;

  bool complete() const noexcept { return missing.empty(); }
};

/// Scores every (system, query) cell for one spec. Run::name is the system id.
/// Pre-retrieval scores are computed once per query and replicated per system.
PredictionRun run_predictor(const PredictorSpec& spec, const TopicSet& topics, std::span<const Run> runs,
                            const CorpusStats& stats, unsigned threads = 1);

} // namespace qpp
