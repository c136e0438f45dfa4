#include "qpp/roster.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument(fmt::format("{}: expected a non-negative integer, got '{}'", key, value));
  }
  return v;
}

void apply_param(PostParams& p, IdfVariant& idf, std::string_view key, std::string_view value) {
  if (key == "k") {
    p.k = parse_count(key, value);
  } else if (key == "n_terms") {
    p.n_terms = parse_count(key, value);
  } else if (key == "mu") {
    try {
      p.mu = csv::parse_double(value);
    } catch (const InputError&) {
      throw std::invalid_argument(fmt::format("mu: not a number '{}'", value));
    }
  } else if (key == "scores") {
    if (value == "lm") p.scores = ScoreSource::language_model;
    else if (value == "run") p.scores = ScoreSource::run;
    else throw std::invalid_argument(fmt::format("scores must be lm or run, got '{}'", value));
  } else if (key == "smv") {
    if (value == "shift") p.smv = SmvPositivity::shift;
    else if (value == "exp") p.smv = SmvPositivity::exp;
    else throw std::invalid_argument(fmt::format("smv must be shift or exp, got '{}'", value));
  } else if (key == "idf") {
    if (value == "smoothed") idf = IdfVariant::smoothed;
    else if (value == "classic") idf = IdfVariant::classic;
    else throw std::invalid_argument(fmt::format("idf must be smoothed or classic, got '{}'", value));
  } else {
    throw std::invalid_argument(fmt::format("unknown roster key '{}'", key));
  }
}

std::string post_params_text(const PostParams& p, std::string_view prefix) {
  return fmt::format("{0}k={1} {0}mu={2} {0}n_terms={3} {0}scores={4} {0}smv={5}", prefix, p.k,
                     csv::format_double(p.mu), p.n_terms, p.scores == ScoreSource::run ? "run" : "lm",
                     p.smv == SmvPositivity::exp ? "exp" : "shift");
}

} // namespace

PredictorSpec parse_roster_line(std::string_view line) {
  const auto words = split_ws(line);
  if (words.empty()) throw std::invalid_argument("empty roster line");
  const PredictorKind kind = parse_predictor_kind(words[0]);

  std::size_t next = 1;
  std::optional<Aggregator> agg;
  if (next < words.size() && words[next].find('=') == std::string_view::npos) {
    agg = parse_aggregator(words[next]);
    ++next;
  }

  std::map<std::string_view, std::string_view> own;
  std::map<std::string_view, std::string_view> base_keys;
  std::string name;
  std::optional<PredictorKind> base_kind;
  for (; next < words.size(); ++next) {
    const auto eq = words[next].find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(fmt::format("expected key=value, got '{}'", words[next]));
    }
    const auto key = words[next].substr(0, eq);
    const auto value = words[next].substr(eq + 1);
    if (key == "name") {
      name = std::string(value);
    } else if (key == "base") {
      base_kind = parse_predictor_kind(value);
    } else if (key.starts_with("base.")) {
      base_keys[key.substr(5)] = value;
    } else {
      own[key] = value;
    }
  }

  PredictorSpec spec;
  spec.kind = kind;
  if (spec.family() == PredictorFamily::pre) {
    spec = PredictorSpec::pre(kind, agg.value_or(kind == PredictorKind::scs ? Aggregator::sum : Aggregator::avg),
                              kind == PredictorKind::scs && name.empty() ? "SCS" : name);
    for (const auto& [k, v] : own) {
      if (k != "idf") throw std::invalid_argument(fmt::format("pre-retrieval predictors take no '{}'", k));
      PostParams ignored;
      apply_param(ignored, spec.idf_variant, k, v);
    }
  } else {
    if (agg) throw std::invalid_argument("post-retrieval predictors take no aggregator");
    PostParams params = default_post_params(kind);
    IdfVariant unused = IdfVariant::smoothed;
    for (const auto& [k, v] : own) apply_param(params, unused, k, v);
    if (kind == PredictorKind::uef) {
      if (!base_kind) throw std::invalid_argument("UEF needs base=<Clarity|NQC|WIG|SMV>");
      PostParams base_params = default_post_params(*base_kind);
      for (const auto& [k, v] : base_keys) apply_param(base_params, unused, k, v);
      spec = PredictorSpec::uef(PredictorSpec::post(*base_kind, base_params), params, name);
    } else {
      if (base_kind || !base_keys.empty()) throw std::invalid_argument("only UEF takes a base predictor");
      spec = PredictorSpec::post(kind, params, name);
    }
  }
  spec.validate();
  return spec;
}

std::string format_roster_line(const PredictorSpec& spec) {
  if (spec.family() == PredictorFamily::pre) {
    std::string line = fmt::format("{} {} name={}", to_string(spec.kind), to_string(spec.aggregator.value()), spec.name);
    if (spec.kind == PredictorKind::idf || spec.kind == PredictorKind::var) {
      line += spec.idf_variant == IdfVariant::classic ? " idf=classic" : " idf=smoothed";
    }
    return line;
  }
  std::string line = fmt::format("{} name={} {}", to_string(spec.kind), spec.name, post_params_text(spec.params, ""));
  if (spec.kind == PredictorKind::uef && spec.base) {
    line += fmt::format(" base={} {}", to_string(spec.base->kind), post_params_text(spec.base->params, "base."));
  }
  return line;
}

bool same_spec(const PredictorSpec& a, const PredictorSpec& b) {
  if (a.name != b.name || a.kind != b.kind || a.aggregator != b.aggregator || a.idf_variant != b.idf_variant) {
    return false;
  }
  if (a.family() == PredictorFamily::post && !(a.params == b.params)) return false;
  if (static_cast<bool>(a.base) != static_cast<bool>(b.base)) return false;
  if (a.base) return a.base->kind == b.base->kind && a.base->params == b.base->params;
  return true;
}

std::vector<PredictorSpec> read_roster(std::istream& in, const std::string& source) {
  std::vector<PredictorSpec> roster;
  std::set<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (split_ws(line).empty()) continue;
    try {
      roster.push_back(parse_roster_line(line));
    } catch (const std::invalid_argument& e) {
      throw InputError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
    if (!names.insert(roster.back().name).second) {
      throw InputError(fmt::format("{}:{}: duplicate predictor name '{}'", source, line_no, roster.back().name));
    }
  }
  if (roster.empty()) throw InputError(source + ": empty predictor roster");
  return roster;
}

std::vector<PredictorSpec> load_roster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open predictor roster: " + path.string());
  return read_roster(in, path.string());
}

} // namespace qpp
