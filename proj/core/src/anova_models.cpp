#include "qpp/anova_models.hpp"

#include <set>

#include <fmt/format.h>

#include "qpp/error.hpp"

namespace qpp {

namespace {

void require_both_types(const std::set<RunType>& types, std::string_view model) {
  if (!types.contains(RunType::tir) || !types.contains(RunType::nir)) {
    throw InputError(fmt::format("{} needs at least one TIR and one NIR system", model));
  }
}

} // namespace

std::vector<TermFactors> md1_terms() {
  return {{"predictor"}, {"run_type"}, {"collection"}, {"run_type", "collection"}};
}

std::vector<TermFactors> md2_terms() {
  return {{"predictor"},         {"topic"},           {"run_type"},
          {"predictor", "topic"}, {"predictor", "run_type"}, {"topic", "run_type"}};
}

ModelFit fit_md1(const SareTable& sare, const SystemCatalog& catalog, OmegaVariant variant) {
  if (sare.size() == 0) throw InputError("MD1: empty sARE table");
  FactorialDataset data({"predictor", "run_type", "collection"});
  std::set<RunType> types;
  std::set<std::string> collections;
  std::vector<std::string> levels(3);
  for (const auto& [key, value] : sare.records()) {
    const SystemInfo& info = catalog.at(key.system);
    types.insert(info.type);
    collections.insert(info.collection);
    levels[0] = key.predictor;
    levels[1] = std::string(to_string(info.type));
    levels[2] = info.collection;
    data.add(levels, value);
  }
  require_both_types(types, "MD1");
  if (collections.size() < 2) throw InputError("MD1 needs systems from at least two collections");
  auto terms = md1_terms();
  AnovaTable table = fit_factorial(data, terms, variant);
  return ModelFit{std::move(data), std::move(terms), std::move(table)};
}

ModelFit fit_md2(const SareTable& sare, const SystemCatalog& catalog, OmegaVariant variant) {
  if (sare.size() == 0) throw InputError("MD2: empty sARE table");
  FactorialDataset data({"predictor", "topic", "run_type"});
  std::set<RunType> types;
  std::set<std::string> collections;
  std::vector<std::string> levels(3);
  for (const auto& [key, value] : sare.records()) {
    const SystemInfo& info = catalog.at(key.system);
    types.insert(info.type);
    collections.insert(info.collection);
    levels[0] = key.predictor;
    levels[1] = key.query_id;
    levels[2] = std::string(to_string(info.type));
    data.add(levels, value);
  }
  require_both_types(types, "MD2");
  if (collections.size() != 1) {
    throw InputError(fmt::format("MD2 fits one collection at a time; table spans {}", collections.size()));
  }
  auto terms = md2_terms();
  AnovaTable table = fit_factorial(data, terms, variant);
  return ModelFit{std::move(data), std::move(terms), std::move(table)};
}

} // namespace qpp
