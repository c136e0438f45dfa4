#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpp/anova.hpp"
#include "qpp/quality.hpp"

namespace qpp {

enum class PlotKind { heatmap, ci_bars };

PlotKind parse_plot_kind(std::string_view name);

/// Header: predictor,system,r (Pearson; empty when undefined).
std::string heatmap_csv(std::span<const CorrelationCell> cells);

/// Header: level,mean,lo,hi. Level combinations are joined with ':'.
std::string ci_bars_csv(std::span<const MarginalMean> means);

} // namespace qpp
