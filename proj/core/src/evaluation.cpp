#include "qpp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

namespace {

double gain_of(int grade, Gain gain) {
  if (grade <= 0) return 0.0;
  return gain == Gain::linear ? static_cast<double>(grade) : std::exp2(static_cast<double>(grade)) - 1.0;
}

} // namespace

bool Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
  auto& judged = by_query_[query_id];
  const auto [it, inserted] = judged.insert_or_assign(doc_id, grade);
  if (inserted) ++size_;
  return !inserted;
}

std::optional<int> Qrels::grade(std::string_view query_id, std::string_view doc_id) const {
  const auto* judged = judgments(query_id);
  if (judged == nullptr) return std::nullopt;
  const auto it = judged->find(doc_id);
  if (it == judged->end()) return std::nullopt;
  return it->second;
}

const QueryJudgments* Qrels::judgments(std::string_view query_id) const {
  const auto it = by_query_.find(query_id);
  return it == by_query_.end() ? nullptr : &it->second;
}

bool Qrels::has_relevant(std::string_view query_id) const {
  const auto* judged = judgments(query_id);
  return judged != nullptr &&
         std::any_of(judged->begin(), judged->end(), [](const auto& kv) { return kv.second > 0; });
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> ids;
  for (const auto& [qid, judged] : by_query_) ids.push_back(qid);
  return ids;
}

NdcgResult ndcg_at_k(const RankedList& list, const QueryJudgments* judgments, std::size_t k, Gain gain) {
  if (k < 1) throw std::invalid_argument("ndcg_at_k: k must be >= 1");
  std::vector<double> ideal_gains;
  if (judgments != nullptr) {
    for (const auto& [doc, grade] : *judgments) {
      if (grade > 0) ideal_gains.push_back(gain_of(grade, gain));
    }
  }
  if (ideal_gains.empty()) return {0.0, true};
  std::sort(ideal_gains.begin(), ideal_gains.end(), std::greater<>());

  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal_gains.size()); ++i) {
    ideal += ideal_gains[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, list.size()); ++i) {
    const auto it = judgments->find(list.entries[i].doc_id);
    if (it == judgments->end()) continue;
    dcg += gain_of(it->second, gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return {dcg / ideal, false};
}

void EvalTable::set(const std::string& system, const std::string& query_id, double value) {
  if (!cells_.emplace(std::make_pair(system, query_id), value).second) {
    throw InputError(fmt::format("duplicate evaluation value for ({}, {})", system, query_id));
  }
}

std::optional<double> EvalTable::value(std::string_view system, std::string_view query_id) const {
  const auto it = cells_.find(std::make_pair(std::string(system), std::string(query_id)));
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> EvalTable::systems() const {
  std::vector<std::string> out;
  for (const auto& [key, v] : cells_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

std::map<std::string, double, std::less<>> EvalTable::values(std::string_view system) const {
  std::map<std::string, double, std::less<>> out;
  auto it = cells_.lower_bound(std::make_pair(std::string(system), std::string()));
  for (; it != cells_.end() && it->first.first == system; ++it) out.emplace(it->first.second, it->second);
  return out;
}

void EvalTable::write_csv(std::ostream& out) const {
  out << "system,query_id,value\n";
  for (const auto& [key, v] : cells_) {
    out << csv::join({key.first, key.second, csv::format_double(v)}) << '\n';
  }
}

EvalTable EvalTable::read_csv(std::istream& in, const std::string& source, std::string measure, std::size_t cutoff) {
  csv::Reader reader(in, source, {"system", "query_id", "value"});
  EvalTable table(std::move(measure), cutoff);
  while (auto row = reader.next()) {
    try {
      table.set((*row)[0], (*row)[1], csv::parse_double((*row)[2]));
    } catch (const InputError& e) {
      reader.fail(e.what());
    }
  }
  return table;
}

EvalTable evaluate_runs(std::span<const Run> runs, const Qrels& qrels, std::span<const std::string> query_ids,
                        std::size_t k, Gain gain) {
  EvalTable table("ndcg", k);
  for (const auto& qid : query_ids) {
    if (!qrels.has_relevant(qid)) {
      table.flag_no_relevant(qid);
      spdlog::warn("query '{}' has no relevant documents in qrels; nDCG is 0", qid);
    }
  }
  static const RankedList kEmpty;
  for (const auto& run : runs) {
    for (const auto& qid : query_ids) {
      const RankedList* list = run.find(qid);
      if (list == nullptr) spdlog::debug("run '{}' has no results for query '{}'", run.name, qid);
      const auto result = ndcg_at_k(list ? *list : kEmpty, qrels.judgments(qid), k, gain);
      table.set(run.name, qid, result.value);
    }
  }
  return table;
}

} // namespace qpp
