#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qpp {

/// TIR: lexical bag-of-words runs. NIR: neural first-stage runs.
enum class RunType { tir, nir };

std::string_view to_string(RunType type);
RunType parse_run_type(std::string_view text);

struct SystemInfo {
  std::string id;
  std::filesystem::path run_path;
  RunType type = RunType::tir;
  std::string collection;
};

/// system_id -> (run file, run type, collection).
class SystemCatalog {
public:
  /// Throws InputError on a duplicate id.
  void add(SystemInfo info);
  const SystemInfo* find(std::string_view id) const;
  /// Throws InputError for unknown ids.
  const SystemInfo& at(std::string_view id) const;

  std::vector<const SystemInfo*> systems() const;
  std::vector<const SystemInfo*> in_collection(std::string_view collection) const;
  std::vector<std::string> collections() const;
  std::size_t size() const noexcept { return systems_.size(); }

  /// Tab-separated: system_id, run_path, TIR|NIR, collection. Relative run
  /// paths resolve against base_dir. '#' lines are comments.
  static SystemCatalog read_tsv(std::istream& in, const std::string& source, const std::filesystem::path& base_dir);
  static SystemCatalog load(const std::filesystem::path& path);

private:
  std::map<std::string, SystemInfo, std::less<>> systems_;
};

} // namespace qpp
