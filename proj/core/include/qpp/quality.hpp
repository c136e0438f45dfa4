#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/evaluation.hpp"
#include "qpp/prediction_table.hpp"

namespace qpp {

enum class Direction { higher_better, lower_better };

/// Total order 1..|Q| over queries; ties go to the smaller query_id.
std::map<std::string, std::size_t, std::less<>> ranks_from_scores(const std::map<std::string, double, std::less<>>& scores,
                                                                  Direction direction = Direction::higher_better);

/// (predictor, system, query) -> |R^e - R^p| / |Q|.
class SareTable {
public:
  using Records = std::map<PredictionKey, double>;

  void insert(std::string predictor, std::string system, std::string query_id, double sare);
  std::optional<double> find(std::string_view predictor, std::string_view system, std::string_view query_id) const;
  /// Mean sARE over the queries of one (predictor, system) pair.
  double smare(std::string_view predictor, std::string_view system) const;

  std::size_t size() const noexcept { return records_.size(); }
  const Records& records() const noexcept { return records_; }
  std::vector<std::string> predictors() const;
  std::vector<std::string> systems() const;

  /// Header: predictor,system,query_id,sare
  void write_csv(std::ostream& out) const;
  static SareTable read_csv(std::istream& in, const std::string& source);

  friend bool operator==(const SareTable&, const SareTable&) = default;

private:
  Records records_;
};

/// Every (system, query) cell of `eval` must have a prediction for every
/// predictor in `pred`, and vice versa; otherwise IncompleteGridError lists
/// the holes. Both measure and prediction are ranked higher-is-better.
SareTable sare_table(const EvalTable& eval, const PredictionTable& pred);

/// Lists every cell missing on either side, as "predictor/system/query: why".
std::vector<std::string> grid_mismatches(const EvalTable& eval, const PredictionTable& pred);

struct CorrelationCell {
  std::string predictor;
  std::string system;
  std::size_t queries = 0;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;
};

/// One cell per (predictor, system); undefined coefficients stay empty.
std::vector<CorrelationCell> correlation_matrix(const EvalTable& eval, const PredictionTable& pred);

/// Header: predictor,system,queries,pearson,spearman,kendall
void write_correlations_csv(std::ostream& out, const std::vector<CorrelationCell>& cells);

} // namespace qpp
