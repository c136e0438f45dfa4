#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpp/anova.hpp"
#include "qpp/evaluation.hpp"

namespace qpp {

struct CollectionConfig {
  std::string name;
  std::filesystem::path stats;
  std::filesystem::path topics;
  std::filesystem::path qrels;
};

/// Everything run_experiment needs. Relative paths are resolved against the
/// directory of the config file.
struct ExperimentConfig {
  std::vector<CollectionConfig> collections;
  std::filesystem::path systems;
  std::optional<std::filesystem::path> predictors; // roster file; default roster when absent
  std::vector<std::filesystem::path> extra_predictions;
  std::size_t cutoff = 10;
  Gain gain = Gain::linear;
  bool md1 = false;
  bool md2 = true;
  OmegaVariant omega = OmegaVariant::standard;
  double ci_level = 0.95;
  double topic_fraction = 0.25;
  unsigned threads = 1;
  std::filesystem::path output;

  /// Plain `key = value` lines, or a JSON object when the first non-blank
  /// character is '{'. Single-collection keys: collection, stats, topics,
  /// qrels. Several collections: `collection.<name>.stats` etc., or a JSON
  /// "collections" array of {name, stats, topics, qrels}.
  static ExperimentConfig parse(std::string_view text, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Sorted `key = value` lines covering every setting, with paths as given.
  std::string canonical() const;

  /// Values as written in the config, used by canonical().
  std::vector<std::pair<std::string, std::string>> raw;
};

} // namespace qpp
