#include "qpp/quality.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "qpp/correlation.hpp"
#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

std::map<std::string, std::size_t, std::less<>> ranks_from_scores(const std::map<std::string, double, std::less<>>& scores,
                                                                  Direction direction) {
  std::vector<std::pair<std::string_view, double>> order(scores.begin(), scores.end());
  // map iteration is already ascending by query_id, so a stable sort keeps that tie-break
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    return direction == Direction::higher_better ? a.second > b.second : a.second < b.second;
  });
  std::map<std::string, std::size_t, std::less<>> ranks;
  for (std::size_t i = 0; i < order.size(); ++i) ranks.emplace(std::string(order[i].first), i + 1);
  return ranks;
}

void SareTable::insert(std::string predictor, std::string system, std::string query_id, double sare) {
  PredictionKey key{std::move(predictor), std::move(system), std::move(query_id)};
  const auto [it, inserted] = records_.emplace(std::move(key), sare);
  if (!inserted) {
    throw InputError(fmt::format("duplicate sARE record for ({}, {}, {})", it->first.predictor, it->first.system,
                                 it->first.query_id));
  }
}

std::optional<double> SareTable::find(std::string_view predictor, std::string_view system,
                                      std::string_view query_id) const {
  const auto it = records_.find(PredictionKey{std::string(predictor), std::string(system), std::string(query_id)});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

double SareTable::smare(std::string_view predictor, std::string_view system) const {
  double sum = 0.0;
  std::size_t n = 0;
  auto it = records_.lower_bound(PredictionKey{std::string(predictor), std::string(system), std::string()});
  for (; it != records_.end() && it->first.predictor == predictor && it->first.system == system; ++it) {
    sum += it->second;
    ++n;
  }
  if (n == 0) throw InputError(fmt::format("no sARE records for ({}, {})", predictor, system));
  return sum / static_cast<double>(n);
}

std::vector<std::string> SareTable::predictors() const {
  std::set<std::string> names;
  for (const auto& [key, v] : records_) names.insert(key.predictor);
  return {names.begin(), names.end()};
}

std::vector<std::string> SareTable::systems() const {
  std::set<std::string> names;
  for (const auto& [key, v] : records_) names.insert(key.system);
  return {names.begin(), names.end()};
}

void SareTable::write_csv(std::ostream& out) const {
  out << "predictor,system,query_id,sare\n";
  for (const auto& [key, v] : records_) {
    out << csv::join({key.predictor, key.system, key.query_id, csv::format_double(v)}) << '\n';
  }
}

SareTable SareTable::read_csv(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source, {"predictor", "system", "query_id", "sare"});
  SareTable table;
  while (auto row = reader.next()) {
    try {
      table.insert((*row)[0], (*row)[1], (*row)[2], csv::parse_double((*row)[3]));
    } catch (const InputError& e) {
      reader.fail(e.what());
    }
  }
  return table;
}

std::vector<std::string> grid_mismatches(const EvalTable& eval, const PredictionTable& pred) {
  std::vector<std::string> missing;
  const auto systems = eval.systems();
  const std::set<std::string> eval_systems(systems.begin(), systems.end());
  for (const auto& predictor : pred.predictors()) {
    for (const auto& system : systems) {
      const auto measured = eval.values(system);
      const auto predicted = pred.scores(predictor, system);
      for (const auto& [qid, v] : measured) {
        if (!predicted.contains(qid)) missing.push_back(fmt::format("{}/{}/{}: no prediction", predictor, system, qid));
      }
      for (const auto& [qid, v] : predicted) {
        if (!measured.contains(qid)) missing.push_back(fmt::format("{}/{}/{}: no evaluation", predictor, system, qid));
      }
    }
  }
  for (const auto& system : pred.systems()) {
    if (!eval_systems.contains(system)) missing.push_back(fmt::format("*/{}/*: system has no evaluation", system));
  }
  return missing;
}

SareTable sare_table(const EvalTable& eval, const PredictionTable& pred) {
  if (auto missing = grid_mismatches(eval, pred); !missing.empty()) throw IncompleteGridError(std::move(missing));
  SareTable table;
  for (const auto& predictor : pred.predictors()) {
    for (const auto& system : eval.systems()) {
      const auto measured = eval.values(system);
      const auto predicted = pred.scores(predictor, system);
      const auto measure_ranks = ranks_from_scores(measured, Direction::higher_better);
      const auto predicted_ranks = ranks_from_scores(predicted, Direction::higher_better);
      const double n = static_cast<double>(measured.size());
      for (const auto& [qid, re] : measure_ranks) {
        const std::size_t rp = predicted_ranks.find(qid)->second;
        const double diff = re > rp ? static_cast<double>(re - rp) : static_cast<double>(rp - re);
        table.insert(predictor, system, qid, diff / n);
      }
    }
  }
  return table;
}

std::vector<CorrelationCell> correlation_matrix(const EvalTable& eval, const PredictionTable& pred) {
  if (auto missing = grid_mismatches(eval, pred); !missing.empty()) throw IncompleteGridError(std::move(missing));
  std::vector<CorrelationCell> cells;
  for (const auto& predictor : pred.predictors()) {
    for (const auto& system : eval.systems()) {
      const auto measured = eval.values(system);
      const auto predicted = pred.scores(predictor, system);
      std::vector<double> x;
      std::vector<double> y;
      for (const auto& [qid, v] : measured) {
        x.push_back(predicted.find(qid)->second);
        y.push_back(v);
      }
      CorrelationCell cell{predictor, system, x.size(), std::nullopt, std::nullopt, std::nullopt};
      const auto attempt = [&](auto&& fn) -> std::optional<double> {
        try {
          return fn(x, y);
        } catch (const UndefinedResult&) {
          return std::nullopt;
        }
      };
      cell.pearson = attempt([](const auto& a, const auto& b) { return pearson(a, b); });
      cell.spearman = attempt([](const auto& a, const auto& b) { return spearman(a, b); });
      cell.kendall = attempt([](const auto& a, const auto& b) { return kendall_tau_b(a, b); });
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_correlations_csv(std::ostream& out, const std::vector<CorrelationCell>& cells) {
  out << "predictor,system,queries,pearson,spearman,kendall\n";
  for (const auto& c : cells) {
    out << csv::join({c.predictor, c.system, std::to_string(c.queries), csv::format_optional(c.pearson),
                      csv::format_optional(c.spearman), csv::format_optional(c.kendall)})
        << '\n';
  }
}

} // namespace qpp
