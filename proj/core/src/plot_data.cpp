#include "qpp/plot_data.hpp"

#include <fmt/format.h>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "heatmap") return PlotKind::heatmap;
  if (name == "ci-bars" || name == "ci_bars") return PlotKind::ci_bars;
  throw InputError(fmt::format("unknown plot kind '{}' (heatmap or ci-bars)", name));
}

std::string heatmap_csv(std::span<const CorrelationCell> cells) {
  std::string out = "predictor,system,r\n";
  for (const auto& c : cells) {
    out += csv::join({c.predictor, c.system, csv::format_optional(c.pearson)});
    out += '\n';
  }
  return out;
}

std::string ci_bars_csv(std::span<const MarginalMean> means) {
  std::string out = "level,mean,lo,hi\n";
  for (const auto& m : means) {
    std::string level;
    for (std::size_t i = 0; i < m.levels.size(); ++i) level += (i ? ":" : "") + m.levels[i];
    out += csv::join({level, csv::format_double(m.mean), csv::format_double(m.lo), csv::format_double(m.hi)});
    out += '\n';
  }
  return out;
}

} // namespace qpp
