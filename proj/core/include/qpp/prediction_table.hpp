#pragma once

#include <compare>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qpp {

struct PredictionKey {
  std::string predictor;
  std::string system;
  std::string query_id;

  friend auto operator<=>(const PredictionKey&, const PredictionKey&) = default;
};

/// (predictor, system, query) -> prediction score; at most one record per key.
class PredictionTable {
public:
  using Records = std::map<PredictionKey, double>;

  /// Throws InputError if the key is already present.
  void insert(std::string predictor, std::string system, std::string query_id, double score);
  std::optional<double> find(std::string_view predictor, std::string_view system, std::string_view query_id) const;
  /// Throws InputError on overlapping keys.
  void merge(const PredictionTable& other);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const Records& records() const noexcept { return records_; }

  std::vector<std::string> predictors() const;
  std::vector<std::string> systems() const;
  /// query_id -> score for one (predictor, system) pair.
  std::map<std::string, double, std::less<>> scores(std::string_view predictor, std::string_view system) const;

  /// Header: predictor,system,query_id,score
  void write_csv(std::ostream& out) const;
  static PredictionTable read_csv(std::istream& in, const std::string& source);

  friend bool operator==(const PredictionTable&, const PredictionTable&) = default;

private:
  Records records_;
};

} // namespace qpp
