#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qpp {

struct RankedEntry {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// One query's result list; entries[i] has rank i + 1.
struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// A retrieval system's output over a topic set (TREC run semantics).
struct Run {
  std::string name;
  std::map<std::string, RankedList, std::less<>> lists;

  const RankedList* find(std::string_view query_id) const {
    const auto it = lists.find(query_id);
    return it == lists.end() ? nullptr : &it->second;
  }

  friend bool operator==(const Run&, const Run&) = default;
};

} // namespace qpp
