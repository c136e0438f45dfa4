#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/predictors.hpp"

namespace qpp {

/// Parses one roster line:
///
///   <Kind> [sum|avg|max] [key=value ...]
///
/// Keys: name, k, mu, n_terms, scores=lm|run, smv=shift|exp,
/// idf=smoothed|classic, base=<Kind>, and base.<key> for the UEF base.
/// Missing post-retrieval parameters take the per-predictor defaults.
PredictorSpec parse_roster_line(std::string_view line);

/// Canonical single-line form; parse_roster_line(format_roster_line(s)) == s.
std::string format_roster_line(const PredictorSpec& spec);

/// '#' starts a comment; blank lines are ignored. Names must be unique.
std::vector<PredictorSpec> read_roster(std::istream& in, const std::string& source);
std::vector<PredictorSpec> load_roster(const std::filesystem::path& path);

bool same_spec(const PredictorSpec& a, const PredictorSpec& b);

} // namespace qpp
