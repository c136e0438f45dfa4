#include "qpp/catalog.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qpp/error.hpp"

namespace qpp {

std::string_view to_string(RunType type) {
  return type == RunType::tir ? "TIR" : "NIR";
}

RunType parse_run_type(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "TIR") return RunType::tir;
  if (upper == "NIR") return RunType::nir;
  throw InputError(fmt::format("unknown run type '{}' (expected TIR or NIR)", text));
}

void SystemCatalog::add(SystemInfo info) {
  if (info.id.empty()) throw InputError("system catalog entry without an id");
  if (systems_.contains(info.id)) throw InputError(fmt::format("duplicate system id '{}'", info.id));
  std::string id = info.id;
  systems_.emplace(std::move(id), std::move(info));
}

const SystemInfo* SystemCatalog::find(std::string_view id) const {
  const auto it = systems_.find(id);
  return it == systems_.end() ? nullptr : &it->second;
}

const SystemInfo& SystemCatalog::at(std::string_view id) const {
  const auto* info = find(id);
  if (!info) throw InputError(fmt::format("system '{}' is not in the catalog", id));
  return *info;
}

std::vector<const SystemInfo*> SystemCatalog::systems() const {
  std::vector<const SystemInfo*> out;
  for (const auto& [id, info] : systems_) out.push_back(&info);
  return out;
}

std::vector<const SystemInfo*> SystemCatalog::in_collection(std::string_view collection) const {
  std::vector<const SystemInfo*> out;
  for (const auto& [id, info] : systems_) {
    if (info.collection == collection) out.push_back(&info);
  }
  return out;
}

std::vector<std::string> SystemCatalog::collections() const {
  std::set<std::string> names;
  for (const auto& [id, info] : systems_) names.insert(info.collection);
  return {names.begin(), names.end()};
}

SystemCatalog SystemCatalog::read_tsv(std::istream& in, const std::string& source,
                                      const std::filesystem::path& base_dir) {
  SystemCatalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 4) {
      throw InputError(fmt::format("{}:{}: expected 4 tab-separated fields (id, run, type, collection), got {}",
                                   source, line_no, fields.size()));
    }
    SystemInfo info;
    info.id = fields[0];
    std::filesystem::path run(fields[1]);
    info.run_path = run.is_relative() ? base_dir / run : run;
    try {
      info.type = parse_run_type(fields[2]);
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
    info.collection = fields[3];
    if (info.collection.empty()) throw InputError(fmt::format("{}:{}: empty collection", source, line_no));
    try {
      catalog.add(std::move(info));
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return catalog;
}

SystemCatalog SystemCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open system catalog '{}'", path.string()));
  return read_tsv(in, path.string(), path.parent_path());
}

} // namespace qpp
