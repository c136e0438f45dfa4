#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpp/corpus.hpp"
#include "qpp/run.hpp"

namespace qpp {

inline constexpr double kDefaultMu = 1000.0;

struct Query {
  std::string query_id;
  std::vector<std::string> tokens;
  std::map<std::string, std::uint32_t, std::less<>> qtf;

  static Query from_tokens(std::string query_id, std::vector<std::string> tokens);
  /// |q| = sum of qtf
  std::size_t length() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

/// Sparse term distribution, sorted by term.
struct LanguageModel {
  std::vector<std::pair<std::string, double>> terms;
  /// Set when the vocabulary was clipped before renormalization.
  bool renormalized = false;

  double probability(std::string_view term) const;
  double mass() const;
  bool empty() const noexcept { return terms.empty(); }
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// P(t|C) = cf(t)/|C|; out-of-vocabulary terms get 1/(|C|+1).
double collection_prob(const CorpusStats& stats, std::string_view term);

/// Dirichlet-smoothed query log-likelihood of one document.
double dirichlet_loglik(const Query& query, const DocVector& doc, const CorpusStats& stats, double mu);

/// Query log-likelihood under the collection model; always <= 0.
double collection_loglik(const Query& query, const CorpusStats& stats);

/// Dirichlet scores of the first min(k, |list|) entries, in run order.
std::vector<ScoredDoc> rescore_topk(const Query& query, const RankedList& list, const CorpusStats& stats, double mu,
                                    std::size_t k);

/// RM1 relevance model estimated from the top-k documents. Document weights
/// are the softmax of their Dirichlet log-likelihoods; the model is clipped
/// to the n_terms most probable terms and renormalized to 1.
LanguageModel rm1(const Query& query, const RankedList& list, const CorpusStats& stats, double mu, std::size_t k,
                  std::size_t n_terms);

/// Cross-entropy score sum_w P(w|RM) ln P_mu(w|d) for each document, sorted
/// by descending score and then ascending doc_id.
std::vector<ScoredDoc> rerank_by_rm(const LanguageModel& rm, std::span<const std::string> doc_ids,
                                    const CorpusStats& stats, double mu);

} // namespace qpp
