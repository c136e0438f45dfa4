#pragma once

#include <map>
#include <span>
#include <string>

#include "qpp/anova.hpp"

namespace qpp::testing {

struct OracleRow {
  double df = 0.0;
  double ss = 0.0;
  double f = 0.0;
};

struct OracleAnova {
  std::map<std::string, OracleRow> terms; // keyed by "A:B" names
  double residual_ss = 0.0;
  double residual_df = 0.0;
};

/// Sequential least-squares ANOVA with reference-coded dummy columns, solved
/// with a QR decomposition. Terms must be listed main effects first.
OracleAnova ols_anova(const FactorialDataset& data, std::span<const TermFactors> terms);

} // namespace qpp::testing
