#include "qpp/topic_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

void TopicSelection::write_csv(std::ostream& out) const {
  out << "query_id,mean_tir,mean_nir,delta,abs_delta,selected\n";
  for (const auto& t : topics) {
    out << csv::join({t.query_id, csv::format_double(t.mean_tir), csv::format_double(t.mean_nir),
                      csv::format_double(t.signed_delta), csv::format_double(std::abs(t.signed_delta)),
                      t.selected ? "1" : "0"})
        << '\n';
  }
}

void TopicSelection::write_summary_csv(std::ostream& out) const {
  out << "selected,tir_better,nir_better,ties\n";
  out << selected.size() << ',' << tir_better << ',' << nir_better << ',' << ties << '\n';
}

TopicSelection select_semantic_topics(const EvalTable& eval, const SystemCatalog& catalog, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InputError(fmt::format("topic fraction must lie in (0, 1], got {}", fraction));
  }
  struct Sums {
    double tir = 0.0;
    double nir = 0.0;
    std::size_t n_tir = 0;
    std::size_t n_nir = 0;
  };
  std::map<std::string, Sums> by_topic;
  bool has_tir = false;
  bool has_nir = false;
  for (const auto& [cell, value] : eval.cells()) {
    const SystemInfo* info = catalog.find(cell.first);
    if (!info) continue;
    auto& s = by_topic[cell.second];
    if (info->type == RunType::tir) {
      s.tir += value;
      ++s.n_tir;
      has_tir = true;
    } else {
      s.nir += value;
      ++s.n_nir;
      has_nir = true;
    }
  }
  if (!has_tir || !has_nir) throw InputError("topic selection needs both TIR and NIR systems");

  TopicSelection out;
  for (const auto& [qid, s] : by_topic) {
    if (s.n_tir == 0 || s.n_nir == 0) {
      throw InputError(fmt::format("topic '{}' lacks TIR or NIR evaluations", qid));
    }
    TopicDelta d;
    d.query_id = qid;
    d.mean_tir = s.tir / static_cast<double>(s.n_tir);
    d.mean_nir = s.nir / static_cast<double>(s.n_nir);
    d.signed_delta = d.mean_nir - d.mean_tir;
    out.topics.push_back(std::move(d));
  }
  std::stable_sort(out.topics.begin(), out.topics.end(), [](const TopicDelta& a, const TopicDelta& b) {
    const double da = std::abs(a.signed_delta);
    const double db = std::abs(b.signed_delta);
    return da != db ? da > db : a.query_id < b.query_id;
  });
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(out.topics.size())));
  for (std::size_t i = 0; i < count; ++i) {
    auto& t = out.topics[i];
    t.selected = true;
    out.selected.push_back(t.query_id);
    if (t.signed_delta < 0.0) {
      ++out.tir_better;
    } else if (t.signed_delta > 0.0) {
      ++out.nir_better;
    } else {
      ++out.ties;
    }
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

} // namespace qpp
