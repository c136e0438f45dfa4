#pragma once

#include <string>
#include <vector>

#include "qpp/anova.hpp"
#include "qpp/catalog.hpp"
#include "qpp/quality.hpp"

namespace qpp {

struct ModelFit {
  FactorialDataset data;
  std::vector<TermFactors> terms;
  AnovaTable table;
};

/// predictor, run_type, collection, run_type:collection
std::vector<TermFactors> md1_terms();
/// predictor, topic, run_type and their pairwise interactions
std::vector<TermFactors> md2_terms();

/// sARE ~ predictor + run_type + collection + run_type:collection over a
/// table whose system ids are unique across collections. Needs at least two
/// collections and both run types.
ModelFit fit_md1(const SareTable& sare, const SystemCatalog& catalog, OmegaVariant variant = OmegaVariant::standard);

/// sARE ~ (predictor + topic + run_type)^2 for the systems of one collection.
ModelFit fit_md2(const SareTable& sare, const SystemCatalog& catalog, OmegaVariant variant = OmegaVariant::standard);

} // namespace qpp
