#pragma once

#include <span>
#include <vector>

namespace qpp {

/// Product-moment correlation. Throws UndefinedResult when fewer than two
/// points are given or either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average (fractional) ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Kendall's tau-b with the standard tie correction.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

} // namespace qpp
