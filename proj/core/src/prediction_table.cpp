#include "qpp/prediction_table.hpp"

#include <set>

#include <fmt/format.h>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

void PredictionTable::insert(std::string predictor, std::string system, std::string query_id, double score) {
  PredictionKey key{std::move(predictor), std::move(system), std::move(query_id)};
  const auto [it, inserted] = records_.emplace(std::move(key), score);
  if (!inserted) {
    throw InputError(fmt::format("duplicate prediction for ({}, {}, {})", it->first.predictor, it->first.system,
                                 it->first.query_id));
  }
}

std::optional<double> PredictionTable::find(std::string_view predictor, std::string_view system,
                                            std::string_view query_id) const {
  const auto it = records_.find(PredictionKey{std::string(predictor), std::string(system), std::string(query_id)});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void PredictionTable::merge(const PredictionTable& other) {
  for (const auto& [key, score] : other.records_) insert(key.predictor, key.system, key.query_id, score);
}

std::vector<std::string> PredictionTable::predictors() const {
  std::set<std::string> names;
  for (const auto& [key, score] : records_) names.insert(key.predictor);
  return {names.begin(), names.end()};
}

std::vector<std::string> PredictionTable::systems() const {
  std::set<std::string> names;
  for (const auto& [key, score] : records_) names.insert(key.system);
  return {names.begin(), names.end()};
}

std::map<std::string, double, std::less<>> PredictionTable::scores(std::string_view predictor,
                                                                   std::string_view system) const {
  std::map<std::string, double, std::less<>> out;
  auto it = records_.lower_bound(PredictionKey{std::string(predictor), std::string(system), std::string()});
  for (; it != records_.end() && it->first.predictor == predictor && it->first.system == system; ++it) {
    out.emplace(it->first.query_id, it->second);
  }
  return out;
}

void PredictionTable::write_csv(std::ostream& out) const {
  out << "predictor,system,query_id,score\n";
  for (const auto& [key, score] : records_) {
    out << csv::join({key.predictor, key.system, key.query_id, csv::format_double(score)}) << '\n';
  }
}

PredictionTable PredictionTable::read_csv(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source, {"predictor", "system", "query_id", "score"});
  PredictionTable table;
  while (auto row = reader.next()) {
    double score = 0.0;
    try {
      score = csv::parse_double((*row)[3]);
    } catch (const InputError& e) {
      reader.fail(e.what());
    }
    try {
      table.insert((*row)[0], (*row)[1], (*row)[2], score);
    } catch (const InputError& e) {
      reader.fail(e.what());
    }
  }
  return table;
}

} // namespace qpp
