#include "qpp/trec_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qpp/csv.hpp"
#include "qpp/error.hpp"

namespace qpp {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::ifstream open(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {} '{}'", what, path.string()));
  return in;
}

} // namespace

Run parse_run(std::istream& in, const std::string& source, std::string name) {
  Run run;
  run.name = std::move(name);
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto f = split_ws(line);
    if (f.size() != 6) {
      throw InputError(fmt::format("{}:{}: expected 6 fields 'qid Q0 docid rank score tag', got {}", source,
                                   line_no, f.size()));
    }
    long long rank = 0;
    const auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), rank);
    if (ec != std::errc() || ptr != f[3].data() + f[3].size()) {
      throw InputError(fmt::format("{}:{}: bad rank '{}'", source, line_no, f[3]));
    }
    double score = 0.0;
    try {
      score = csv::parse_double(f[4]);
    } catch (const InputError&) {
      throw InputError(fmt::format("{}:{}: bad score '{}'", source, line_no, f[4]));
    }
    if (!std::isfinite(score)) throw InputError(fmt::format("{}:{}: non-finite score", source, line_no));
    std::string qid(f[0]);
    std::string doc(f[2]);
    if (!seen.emplace(qid, doc).second) {
      throw InputError(fmt::format("{}:{}: duplicate document '{}' for query '{}'", source, line_no, doc, qid));
    }
    auto& list = run.lists[qid];
    list.query_id = qid;
    list.entries.push_back(RankedEntry{std::move(doc), score});
  }
  for (auto& [qid, list] : run.lists) {
    std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
      return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
  }
  return run;
}

Run parse_run(const std::filesystem::path& path, std::string name) {
  auto in = open(path, "run file");
  return parse_run(in, path.string(), std::move(name));
}

void write_run(std::ostream& out, const Run& run, std::string_view tag) {
  const std::string_view t = tag.empty() ? std::string_view(run.name) : tag;
  for (const auto& [qid, list] : run.lists) {
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      out << qid << " Q0 " << list.entries[i].doc_id << ' ' << (i + 1) << ' '
          << csv::format_double(list.entries[i].score) << ' ' << (t.empty() ? "run" : t) << '\n';
    }
  }
}

Qrels parse_qrels(std::istream& in, const std::string& source) {
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto f = split_ws(line);
    if (f.size() != 4) {
      throw InputError(fmt::format("{}:{}: expected 4 fields 'qid 0 docid grade', got {}", source, line_no, f.size()));
    }
    int grade = 0;
    const auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), grade);
    if (ec != std::errc() || ptr != f[3].data() + f[3].size()) {
      throw InputError(fmt::format("{}:{}: bad grade '{}'", source, line_no, f[3]));
    }
    if (grade < 0) {
      spdlog::warn("{}:{}: negative grade {} clamped to 0", source, line_no, grade);
      grade = 0;
    }
    if (qrels.set(std::string(f[0]), std::string(f[2]), grade)) {
      spdlog::warn("{}:{}: repeated judgement for ({}, {}); keeping the last one", source, line_no, f[0], f[2]);
    }
  }
  return qrels;
}

Qrels parse_qrels(const std::filesystem::path& path) {
  auto in = open(path, "qrels file");
  return parse_qrels(in, path.string());
}

std::map<std::string, std::string, std::less<>> parse_topic_texts(std::istream& in, const std::string& source) {
  std::map<std::string, std::string, std::less<>> texts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw InputError(fmt::format("{}:{}: expected 'qid<TAB>text'", source, line_no));
    }
    std::string qid = line.substr(0, tab);
    if (texts.contains(qid)) throw InputError(fmt::format("{}:{}: duplicate topic id '{}'", source, line_no, qid));
    texts.emplace(std::move(qid), line.substr(tab + 1));
  }
  return texts;
}

TopicSet parse_topics(const std::filesystem::path& path, const TokenizationConfig& tokenization) {
  auto in = open(path, "topics file");
  return TopicSet::from_texts(parse_topic_texts(in, path.string()), tokenization);
}

} // namespace qpp
