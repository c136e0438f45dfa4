#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qpp {

/// Observations of a crossed design: one level per factor plus a response.
class FactorialDataset {
public:
  struct Observation {
    std::vector<std::uint32_t> levels; // ids into level_names(f)
    double response = 0.0;
  };

  explicit FactorialDataset(std::vector<std::string> factors);

  void add(std::span<const std::string> levels, double response);
  void add(std::initializer_list<std::string> levels, double response) {
    add(std::span<const std::string>(levels.begin(), levels.size()), response);
  }

  const std::vector<std::string>& factors() const noexcept { return factors_; }
  std::size_t factor_index(std::string_view name) const;
  /// Level names of factor f in first-seen order (the ids used by observations).
  const std::vector<std::string>& level_names(std::size_t f) const { return level_names_.at(f); }
  /// Level names of factor f in ascending order.
  std::vector<std::string> sorted_levels(std::size_t f) const;
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  std::size_t size() const noexcept { return observations_.size(); }

private:
  std::vector<std::string> factors_;
  std::vector<std::vector<std::string>> level_names_;
  std::vector<std::map<std::string, std::uint32_t, std::less<>>> level_ids_;
  std::vector<Observation> observations_;
};

/// Factor names making up one model term; {"A"} is a main effect,
/// {"A", "B"} the A:B interaction.
using TermFactors = std::vector<std::string>;

enum class OmegaVariant {
  standard, ///< df(F-1) / (df(F-1) + N), clamped to [0, 1]
  direct,   ///< df F / (df (F-1) N), undefined for F <= 1
};

struct AnovaRow {
  std::string term;
  std::vector<std::string> factors;
  double df = 0.0;
  double ss = 0.0;
  double ms = 0.0;
  double f = 0.0;
  double p = 1.0;
  std::optional<double> omega2; // empty when undefined under the chosen variant
};

struct AnovaTable {
  std::vector<AnovaRow> terms;
  AnovaRow residual;
  double total_ss = 0.0;
  double total_df = 0.0;
  double grand_mean = 0.0;
  std::size_t observations = 0;
  bool balanced = false;
  OmegaVariant omega_variant = OmegaVariant::standard;

  const AnovaRow& term(std::string_view name) const;

  /// Header: term,df,ss,ms,f,p,omega2; Residual and Total rows leave the
  /// columns that do not apply empty.
  void write_csv(std::ostream& out) const;
  /// Aligned plain-text rendering with an SOA column.
  std::string to_text() const;
};

/// Fixed-effects factorial ANOVA via the cell-means decomposition. Every cell
/// of the crossing of the factors used by `terms` must be non-empty and the
/// cell counts must be balanced or proportional (product of the marginal
/// frequencies); anything else throws InputError. A residual with df <= 0
/// (saturated model) also throws.
AnovaTable fit_factorial(const FactorialDataset& data, std::span<const TermFactors> terms,
                         OmegaVariant variant = OmegaVariant::standard);

/// Drops levels of `factor` whose cells deviate from the most common cell
/// count in the crossing of the factors used by `terms`, leaving a balanced
/// design when possible.
FactorialDataset drop_incomplete_levels(const FactorialDataset& data, std::string_view factor,
                                        std::span<const TermFactors> terms);

/// Throws std::invalid_argument unless N > df + 1 and F >= 0; the direct
/// variant throws UndefinedResult for F <= 1.
double omega_squared(double df_term, double f, double n, OmegaVariant variant = OmegaVariant::standard);

enum class Soa { small, medium, large };

/// small below 0.06, medium in [0.06, 0.14), large from 0.14.
Soa soa_class(double omega2);
std::string_view to_string(Soa soa);

struct MarginalMean {
  std::vector<std::string> levels;
  std::size_t n = 0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// mean +- t_{(1+confidence)/2, df_res} sqrt(MS_res / n) per level (or level
/// combination) of `factors`, using the residual of a fitted table.
std::vector<MarginalMean> marginal_means_ci(const FactorialDataset& data, const AnovaTable& fit,
                                            std::span<const std::string> factors, double confidence = 0.95);

} // namespace qpp
