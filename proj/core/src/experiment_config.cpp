#include "qpp/experiment_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

namespace {

using Entries = std::map<std::string, std::string>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

void put(Entries& entries, std::string key, std::string value, std::string_view where) {
  if (!entries.emplace(key, std::move(value)).second) {
    throw InputError(fmt::format("{}: duplicate config key '{}'", where, key));
  }
}

Entries parse_key_values(std::string_view text) {
  Entries entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError(fmt::format("config line {}: expected 'key = value'", line_no));
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw InputError(fmt::format("config line {}: empty key", line_no));
    put(entries, std::move(key), trim(std::string_view(t).substr(eq + 1)), fmt::format("config line {}", line_no));
  }
  return entries;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return csv::format_double(v.get<double>());
  throw InputError(fmt::format("config key '{}' must be a scalar", key));
}

Entries parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("config JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw InputError("config JSON must be an object");
  Entries entries;
  for (const auto& [key, value] : doc.items()) {
    if (key == "collections") {
      if (!value.is_array()) throw InputError("config 'collections' must be an array");
      for (const auto& c : value) {
        if (!c.is_object() || !c.contains("name")) throw InputError("each collection needs a 'name'");
        const std::string name = json_scalar(c.at("name"), "name");
        for (const auto& [ck, cv] : c.items()) {
          if (ck == "name") continue;
          put(entries, fmt::format("collection.{}.{}", name, ck), json_scalar(cv, ck), "config JSON");
        }
      }
    } else if (value.is_array()) {
      std::vector<std::string> parts;
      for (const auto& item : value) parts.push_back(json_scalar(item, key));
      std::string joined;
      for (std::size_t i = 0; i < parts.size(); ++i) joined += (i ? "," : "") + parts[i];
      put(entries, key, joined, "config JSON");
    } else {
      put(entries, key, json_scalar(value, key), "config JSON");
    }
  }
  return entries;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto end = comma == std::string_view::npos ? value.size() : comma;
    std::string item = trim(value.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw InputError(fmt::format("config '{}': expected a non-negative integer, got '{}'", key, value));
  }
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    return csv::parse_double(value);
  } catch (const std::exception&) {
    throw InputError(fmt::format("config '{}': expected a number, got '{}'", key, value));
  }
}

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

} // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text, const std::filesystem::path& base_dir) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool is_json = first != std::string_view::npos && text[first] == '{';
  const Entries entries = is_json ? parse_json(text) : parse_key_values(text);

  ExperimentConfig cfg;
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base_dir / path : path;
  };

  std::map<std::string, CollectionConfig> multi;
  CollectionConfig single;
  bool has_single = false;
  for (const auto& [key, value] : entries) {
    cfg.raw.emplace_back(key, value);
    if (key.starts_with("collection.")) {
      const auto dot = key.rfind('.');
      const std::string name = key.substr(11, dot > 11 ? dot - 11 : 0);
      const std::string field = key.substr(dot + 1);
      if (!valid_name(name) || dot <= 11) throw InputError(fmt::format("config key '{}': bad collection name", key));
      auto& c = multi[name];
      c.name = name;
      if (field == "stats") c.stats = resolve(value);
      else if (field == "topics") c.topics = resolve(value);
      else if (field == "qrels") c.qrels = resolve(value);
      else throw InputError(fmt::format("unknown config key '{}'", key));
    } else if (key == "collection") {
      single.name = value;
    } else if (key == "stats") {
      single.stats = resolve(value);
      has_single = true;
    } else if (key == "topics") {
      single.topics = resolve(value);
      has_single = true;
    } else if (key == "qrels") {
      single.qrels = resolve(value);
      has_single = true;
    } else if (key == "systems") {
      cfg.systems = resolve(value);
    } else if (key == "predictors") {
      if (!value.empty() && value != "default") cfg.predictors = resolve(value);
    } else if (key == "extra_predictions") {
      for (const auto& p : split_list(value)) cfg.extra_predictions.push_back(resolve(p));
    } else if (key == "cutoff") {
      cfg.cutoff = parse_size(key, value);
      if (cfg.cutoff == 0) throw InputError("config 'cutoff' must be positive");
    } else if (key == "gain") {
      if (value == "linear") cfg.gain = Gain::linear;
      else if (value == "exponential") cfg.gain = Gain::exponential;
      else throw InputError(fmt::format("config 'gain': expected linear or exponential, got '{}'", value));
    } else if (key == "anova") {
      cfg.md1 = false;
      cfg.md2 = false;
      for (const auto& m : split_list(value)) {
        if (m == "md1") cfg.md1 = true;
        else if (m == "md2") cfg.md2 = true;
        else if (m != "none") throw InputError(fmt::format("config 'anova': unknown model '{}'", m));
      }
    } else if (key == "omega") {
      if (value == "standard") cfg.omega = OmegaVariant::standard;
      else if (value == "direct") cfg.omega = OmegaVariant::direct;
      else throw InputError(fmt::format("config 'omega': expected standard or direct, got '{}'", value));
    } else if (key == "ci_level") {
      cfg.ci_level = parse_number(key, value);
      if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) throw InputError("config 'ci_level' must lie in (0, 1)");
    } else if (key == "topic_fraction") {
      cfg.topic_fraction = parse_number(key, value);
      if (!(cfg.topic_fraction > 0.0 && cfg.topic_fraction <= 1.0)) {
        throw InputError("config 'topic_fraction' must lie in (0, 1]");
      }
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_size(key, value));
    } else if (key == "output") {
      cfg.output = resolve(value);
    } else {
      throw InputError(fmt::format("unknown config key '{}'", key));
    }
  }

  if (has_single && !multi.empty()) throw InputError("config mixes single-collection keys with collection.<name>.* keys");
  if (has_single) {
    if (single.name.empty()) single.name = "default";
    if (!valid_name(single.name)) throw InputError(fmt::format("bad collection name '{}'", single.name));
    cfg.collections.push_back(std::move(single));
  }
  for (auto& [name, c] : multi) cfg.collections.push_back(std::move(c));
  if (cfg.collections.empty()) throw InputError("config names no collection (stats, topics, qrels)");
  for (const auto& c : cfg.collections) {
    if (c.stats.empty() || c.topics.empty() || c.qrels.empty()) {
      throw InputError(fmt::format("collection '{}' needs stats, topics and qrels", c.name));
    }
  }
  if (cfg.systems.empty()) throw InputError("config is missing 'systems'");
  if (cfg.md1 && cfg.collections.size() < 2) throw InputError("MD1 needs at least two collections");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path());
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> values;
  values["cutoff"] = std::to_string(cutoff);
  values["gain"] = gain == Gain::linear ? "linear" : "exponential";
  values["anova"] = md1 && md2 ? "md1,md2" : md1 ? "md1" : md2 ? "md2" : "none";
  values["omega"] = omega == OmegaVariant::standard ? "standard" : "direct";
  values["ci_level"] = csv::format_double(ci_level);
  values["topic_fraction"] = csv::format_double(topic_fraction);
  values["threads"] = std::to_string(threads);
  values["predictors"] = "default";
  values["extra_predictions"] = "";
  for (const auto& [key, value] : raw) {
    if (key == "cutoff" || key == "gain" || key == "anova" || key == "omega" || key == "ci_level" ||
        key == "topic_fraction" || key == "threads") {
      continue;
    }
    values[key] = value;
  }
  std::string out;
  for (const auto& [key, value] : values) out += fmt::format("{} = {}\n", key, value);
  return out;
}

} // namespace qpp
