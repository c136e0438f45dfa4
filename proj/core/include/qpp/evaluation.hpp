#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/run.hpp"

namespace qpp {

using QueryJudgments = std::map<std::string, int, std::less<>>;

/// Graded relevance judgements, (query_id, doc_id) -> grade >= 0.
class Qrels {
public:
  /// Returns true when an existing grade was overwritten.
  bool set(const std::string& query_id, const std::string& doc_id, int grade);
  std::optional<int> grade(std::string_view query_id, std::string_view doc_id) const;
  /// nullptr when the query has no judgements at all.
  const QueryJudgments* judgments(std::string_view query_id) const;
  bool has_relevant(std::string_view query_id) const;

  std::vector<std::string> query_ids() const;
  std::size_t size() const noexcept { return size_; }

private:
  std::map<std::string, QueryJudgments, std::less<>> by_query_;
  std::size_t size_ = 0;
};

enum class Gain { linear, exponential };

struct NdcgResult {
  double value = 0.0;
  /// No positively graded document for this query; value is 0.
  bool no_relevant = false;
};

/// DCG@k / ideal DCG@k with a log2(rank + 1) discount.
NdcgResult ndcg_at_k(const RankedList& list, const QueryJudgments* judgments, std::size_t k, Gain gain = Gain::linear);

/// (system, query_id) -> measure value in [0, 1].
class EvalTable {
public:
  EvalTable() = default;
  EvalTable(std::string measure, std::size_t cutoff) : measure_(std::move(measure)), cutoff_(cutoff) {}

  /// Throws InputError when the cell already has a value.
  void set(const std::string& system, const std::string& query_id, double value);
  std::optional<double> value(std::string_view system, std::string_view query_id) const;
  void flag_no_relevant(const std::string& query_id) { flagged_.insert(query_id); }

  std::vector<std::string> systems() const;
  /// query_id -> value for one system.
  std::map<std::string, double, std::less<>> values(std::string_view system) const;
  const std::map<std::pair<std::string, std::string>, double>& cells() const noexcept { return cells_; }
  const std::set<std::string>& flagged_queries() const noexcept { return flagged_; }
  std::size_t size() const noexcept { return cells_.size(); }

  const std::string& measure() const noexcept { return measure_; }
  std::size_t cutoff() const noexcept { return cutoff_; }

  /// Header: system,query_id,value
  void write_csv(std::ostream& out) const;
  static EvalTable read_csv(std::istream& in, const std::string& source, std::string measure = "ndcg",
                            std::size_t cutoff = 10);

private:
  std::string measure_ = "ndcg";
  std::size_t cutoff_ = 10;
  std::map<std::pair<std::string, std::string>, double> cells_;
  std::set<std::string> flagged_;
};

/// nDCG@k for every (run, query) pair. A query the run did not answer scores
/// 0; queries without relevant documents score 0 and are flagged.
EvalTable evaluate_runs(std::span<const Run> runs, const Qrels& qrels, std::span<const std::string> query_ids,
                        std::size_t k, Gain gain = Gain::linear);

} // namespace qpp
