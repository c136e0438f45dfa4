#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qpp/tokenizer.hpp"

namespace qpp {

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
};

struct TermStats {
  std::uint64_t df = 0;
  std::uint64_t cf = 0;

  friend bool operator==(const TermStats&, const TermStats&) = default;
};

/// Number of documents in which a term occurs exactly `tf` times.
struct TfBucket {
  std::uint32_t tf = 0;
  std::uint32_t docs = 0;

  friend bool operator==(const TfBucket&, const TfBucket&) = default;
};

/// Bag-of-words view of one document, sorted by term.
class DocVector {
public:
  using Entry = std::pair<std::string, std::uint32_t>;

  DocVector() = default;
  static DocVector from_tokens(std::span<const std::string> tokens);

  std::uint32_t tf(std::string_view term) const;
  std::uint64_t length() const noexcept { return length_; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  friend bool operator==(const DocVector&, const DocVector&) = default;

private:
  friend class CorpusStats;
  std::vector<Entry> entries_;
  std::uint64_t length_ = 0;
};

struct TermEntry {
  TermStats stats;
  std::vector<TfBucket> tf_histogram; // ascending tf

  friend bool operator==(const TermEntry&, const TermEntry&) = default;
};

struct DocEntry {
  std::uint64_t length = 0;
  std::optional<DocVector> vector;

  friend bool operator==(const DocEntry&, const DocEntry&) = default;
};

/// Immutable collection statistics. Built once by CorpusStatsBuilder (or
/// loaded from disk) and then shared read-only.
class CorpusStats {
public:
  using TermTable = std::map<std::string, TermEntry, std::less<>>;
  using DocTable = std::map<std::string, DocEntry, std::less<>>;

  CorpusStats() = default;

  std::uint64_t num_docs() const noexcept { return num_docs_; }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::size_t vocabulary_size() const noexcept { return terms_.size(); }

  std::optional<TermStats> term_stats(std::string_view term) const;
  /// Per-tf document counts for `term`; empty for out-of-vocabulary terms.
  std::span<const TfBucket> tf_histogram(std::string_view term) const;
  std::optional<std::uint64_t> doc_length(std::string_view doc_id) const;
  /// nullptr when the document is unknown or its vector was not retained.
  const DocVector* doc_vector(std::string_view doc_id) const;
  std::size_t stored_vectors() const;

  const TermTable& terms() const noexcept { return terms_; }
  const DocTable& docs() const noexcept { return docs_; }
  const TokenizationConfig& tokenization() const noexcept { return tokenization_; }

  /// Writes the binary stats file plus a plain-text "<path>.manifest".
  void save(const std::filesystem::path& path) const;
  static CorpusStats load(const std::filesystem::path& path);
  std::string manifest() const;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;

private:
  friend class CorpusStatsBuilder;

  void check_invariants() const;

  TokenizationConfig tokenization_;
  std::uint64_t num_docs_ = 0;
  std::uint64_t total_tokens_ = 0;
  TermTable terms_;
  DocTable docs_;
};

/// Single-pass accumulator. Builders over disjoint document subsets can be
/// merged; all counts are integral so merge order never changes the result.
class CorpusStatsBuilder {
public:
  using Allowlist = std::unordered_set<std::string>;

  explicit CorpusStatsBuilder(TokenizationConfig tokenization = {},
                              std::shared_ptr<const Allowlist> vector_allowlist = nullptr);

  /// Throws InputError on an empty or duplicate doc_id.
  void add(Document doc);
  void merge(CorpusStatsBuilder&& other);
  std::size_t size() const noexcept { return docs_.size(); }

  CorpusStats finish() &&;

private:
  struct TermAccumulator {
    TermStats stats;
    std::map<std::uint32_t, std::uint32_t> histogram;
  };

  TokenizationConfig tokenization_;
  std::shared_ptr<const Allowlist> allowlist_;
  std::uint64_t total_tokens_ = 0;
  std::map<std::string, TermAccumulator, std::less<>> terms_;
  CorpusStats::DocTable docs_;
};

struct BuildOptions {
  TokenizationConfig tokenization;
  /// When set, only documents in the allowlist keep their term vectors.
  std::shared_ptr<const CorpusStatsBuilder::Allowlist> vector_allowlist;
  unsigned threads = 1;
};

CorpusStats build_stats(std::vector<Document> documents, const BuildOptions& options = {});

/// (df, cf) for a term, or nullopt when it is out of vocabulary.
inline std::optional<TermStats> term_stats(const CorpusStats& stats, std::string_view term) {
  return stats.term_stats(term);
}

} // namespace qpp
