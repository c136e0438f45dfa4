#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qpp/catalog.hpp"
#include "qpp/evaluation.hpp"

namespace qpp {

struct TopicDelta {
  std::string query_id;
  double mean_tir = 0.0;
  double mean_nir = 0.0;
  /// mean_nir - mean_tir; the selection ranks by its absolute value.
  double signed_delta = 0.0;
  bool selected = false;
};

struct TopicSelection {
  /// Every topic, ordered by descending |delta| then ascending query_id.
  std::vector<TopicDelta> topics;
  std::vector<std::string> selected; // ascending query_id
  std::size_t tir_better = 0;
  std::size_t nir_better = 0;
  std::size_t ties = 0;

  /// Header: query_id,mean_tir,mean_nir,delta,abs_delta,selected
  void write_csv(std::ostream& out) const;
  /// Header: selected,tir_better,nir_better,ties
  void write_summary_csv(std::ostream& out) const;
};

/// Selects the floor(fraction * |Q|) topics with the largest gap between the
/// mean TIR and mean NIR measure. Only systems in the catalog count, and both
/// run types must be present. fraction must lie in (0, 1].
TopicSelection select_semantic_topics(const EvalTable& eval, const SystemCatalog& catalog, double fraction);

} // namespace qpp
