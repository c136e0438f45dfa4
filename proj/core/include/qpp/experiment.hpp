#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpp/anova_models.hpp"
#include "qpp/evaluation.hpp"
#include "qpp/experiment_config.hpp"
#include "qpp/plot_data.hpp"
#include "qpp/prediction_table.hpp"
#include "qpp/quality.hpp"
#include "qpp/topic_selection.hpp"

namespace qpp {

struct CollectionResult {
  std::string name;
  PredictionTable predictions;
  EvalTable eval;
  SareTable sare;
  std::vector<CorrelationCell> correlations;
  std::optional<ModelFit> md2;
  std::optional<TopicSelection> topics;
};

/// file name -> contents. Kept in memory until every stage has succeeded.
using Bundle = std::map<std::string, std::string>;

struct ExperimentResult {
  std::vector<CollectionResult> collections;
  std::optional<ModelFit> md1;
  double ci_level = 0.95;
  Bundle files;
};

/// Runs prediction, evaluation, correlation, sARE, ANOVA and topic
/// selection for every configured collection. Throws IncompleteGridError,
/// listing every missing cell, before any output exists.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Plot-ready CSVs derived from a finished experiment, keyed by file name.
/// heatmap: one file per collection; ci-bars: one per fitted model factor.
Bundle emit_plot_data(const ExperimentResult& result, PlotKind kind);

/// Creates `dir` and writes every file of the bundle.
void write_bundle(const Bundle& bundle, const std::filesystem::path& dir);

} // namespace qpp
