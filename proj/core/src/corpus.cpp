#include "qpp/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qpp/error.hpp"
#include "qpp/parallel.hpp"

namespace qpp {

namespace {

constexpr std::array<char, 8> kMagic = {'Q', 'P', 'P', 'S', 'T', 'A', 'T', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

class BinaryWriter {
public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void raw(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

private:
  void put_le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::ostream& out_;
};

class BinaryReader {
public:
  BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    check();
    return s;
  }
  void raw(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    check();
  }

private:
  std::uint64_t get_le(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) truncated();
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
  }
  void check() {
    if (!in_) truncated();
  }
  [[noreturn]] void truncated() { throw InputError("truncated corpus stats file: " + source_); }

  std::istream& in_;
  std::string source_;
};

} // namespace

DocVector DocVector::from_tokens(std::span<const std::string> tokens) {
  std::vector<std::string_view> sorted(tokens.begin(), tokens.end());
  std::sort(sorted.begin(), sorted.end());
  DocVector v;
  v.length_ = tokens.size();
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    v.entries_.emplace_back(std::string(sorted[i]), static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return v;
}

std::uint32_t DocVector::tf(std::string_view term) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), term,
                                   [](const Entry& e, std::string_view t) { return e.first < t; });
  return (it != entries_.end() && it->first == term) ? it->second : 0;
}

std::optional<TermStats> CorpusStats::term_stats(std::string_view term) const {
  const auto it = terms_.find(term);
  if (it == terms_.end()) return std::nullopt;
  return it->second.stats;
}

std::span<const TfBucket> CorpusStats::tf_histogram(std::string_view term) const {
  const auto it = terms_.find(term);
  if (it == terms_.end()) return {};
  return it->second.tf_histogram;
}

std::optional<std::uint64_t> CorpusStats::doc_length(std::string_view doc_id) const {
  const auto it = docs_.find(doc_id);
  if (it == docs_.end()) return std::nullopt;
  return it->second.length;
}

const DocVector* CorpusStats::doc_vector(std::string_view doc_id) const {
  const auto it = docs_.find(doc_id);
  if (it == docs_.end() || !it->second.vector) return nullptr;
  return &*it->second.vector;
}

std::size_t CorpusStats::stored_vectors() const {
  return static_cast<std::size_t>(
      std::count_if(docs_.begin(), docs_.end(), [](const auto& kv) { return kv.second.vector.has_value(); }));
}

void CorpusStats::check_invariants() const {
  std::uint64_t cf_sum = 0;
  for (const auto& [term, entry] : terms_) {
    const auto& s = entry.stats;
    if (s.df < 1 || s.df > num_docs_ || s.df > s.cf) {
      throw std::logic_error(fmt::format("term '{}' violates 1 <= df <= N, df <= cf", term));
    }
    std::uint64_t hist_docs = 0;
    std::uint64_t hist_occ = 0;
    for (const auto& b : entry.tf_histogram) {
      hist_docs += b.docs;
      hist_occ += static_cast<std::uint64_t>(b.tf) * b.docs;
    }
    if (hist_docs != s.df || hist_occ != s.cf) {
      throw std::logic_error(fmt::format("term '{}' histogram disagrees with df/cf", term));
    }
    cf_sum += s.cf;
  }
  std::uint64_t len_sum = 0;
  for (const auto& [id, doc] : docs_) {
    len_sum += doc.length;
    if (doc.vector) {
      for (const auto& [term, tf] : doc.vector->entries()) {
        if (!terms_.contains(term)) {
          throw std::logic_error(fmt::format("doc '{}' references unknown term '{}'", id, term));
        }
      }
    }
  }
  if (cf_sum != total_tokens_ || len_sum != total_tokens_ || docs_.size() != num_docs_) {
    throw std::logic_error(fmt::format("corpus totals disagree: sum cf = {}, sum |d| = {}, |C| = {}", cf_sum,
                                       len_sum, total_tokens_));
  }
}

std::string CorpusStats::manifest() const {
  std::string out;
  out += "format = qppwb-corpus-stats\n";
  out += fmt::format("version = {}\n", kFormatVersion);
  out += fmt::format("num_docs = {}\n", num_docs_);
  out += fmt::format("total_tokens = {}\n", total_tokens_);
  out += fmt::format("vocabulary = {}\n", terms_.size());
  out += fmt::format("doc_vectors = {}\n", stored_vectors());
  out += fmt::format("remove_stopwords = {}\n", tokenization_.remove_stopwords);
  out += fmt::format("stem = {}\n", tokenization_.stem);
  out += fmt::format("stopwords = {}\n", tokenization_.stopwords.size());
  return out;
}

void CorpusStats::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write corpus stats file: " + path.string());
  BinaryWriter w(out);
  w.raw(kMagic.data(), kMagic.size());
  w.u32(kFormatVersion);
  w.u8(tokenization_.remove_stopwords ? 1 : 0);
  w.u8(tokenization_.stem ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(tokenization_.stopwords.size()));
  for (const auto& s : tokenization_.stopwords) w.str(s);
  w.u64(num_docs_);
  w.u64(total_tokens_);

  w.u64(terms_.size());
  std::map<std::string_view, std::uint32_t> term_ids;
  std::uint32_t next_id = 0;
  for (const auto& [term, entry] : terms_) {
    term_ids.emplace(term, next_id++);
    w.str(term);
    w.u64(entry.stats.df);
    w.u64(entry.stats.cf);
    w.u32(static_cast<std::uint32_t>(entry.tf_histogram.size()));
    for (const auto& b : entry.tf_histogram) {
      w.u32(b.tf);
      w.u32(b.docs);
    }
  }
  w.u64(docs_.size());
  for (const auto& [id, doc] : docs_) {
    w.str(id);
    w.u64(doc.length);
    w.u8(doc.vector ? 1 : 0);
    if (doc.vector) {
      const auto entries = doc.vector->entries();
      w.u32(static_cast<std::uint32_t>(entries.size()));
      for (const auto& [term, tf] : entries) {
        w.u32(term_ids.at(term));
        w.u32(tf);
      }
    }
  }
  if (!out) throw InputError("failed writing corpus stats file: " + path.string());

  std::ofstream manifest_out(path.string() + ".manifest", std::ios::trunc);
  manifest_out << manifest();
}

CorpusStats CorpusStats::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus stats file: " + path.string());
  BinaryReader r(in, path.string());
  std::array<char, 8> magic{};
  r.raw(magic.data(), magic.size());
  if (magic != kMagic) throw InputError("not a corpus stats file (bad magic): " + path.string());
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw InputError(fmt::format("unsupported corpus stats version {} in {}", version, path.string()));
  }
  CorpusStats stats;
  stats.tokenization_.remove_stopwords = r.u8() != 0;
  stats.tokenization_.stem = r.u8() != 0;
  stats.tokenization_.stopwords.clear();
  const std::uint32_t n_stop = r.u32();
  for (std::uint32_t i = 0; i < n_stop; ++i) stats.tokenization_.stopwords.push_back(r.str());
  stats.num_docs_ = r.u64();
  stats.total_tokens_ = r.u64();

  const std::uint64_t n_terms = r.u64();
  std::vector<std::string> term_names;
  term_names.reserve(n_terms);
  for (std::uint64_t i = 0; i < n_terms; ++i) {
    std::string term = r.str();
    TermEntry entry;
    entry.stats.df = r.u64();
    entry.stats.cf = r.u64();
    const std::uint32_t n_hist = r.u32();
    entry.tf_histogram.reserve(n_hist);
    for (std::uint32_t h = 0; h < n_hist; ++h) {
      TfBucket b;
      b.tf = r.u32();
      b.docs = r.u32();
      entry.tf_histogram.push_back(b);
    }
    term_names.push_back(term);
    stats.terms_.emplace_hint(stats.terms_.end(), std::move(term), std::move(entry));
  }
  const std::uint64_t n_docs = r.u64();
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    std::string id = r.str();
    DocEntry doc;
    doc.length = r.u64();
    if (r.u8() != 0) {
      DocVector v;
      v.length_ = doc.length;
      const std::uint32_t n_entries = r.u32();
      v.entries_.reserve(n_entries);
      for (std::uint32_t e = 0; e < n_entries; ++e) {
        const std::uint32_t term_id = r.u32();
        const std::uint32_t tf = r.u32();
        if (term_id >= term_names.size()) throw InputError("corrupt term id in corpus stats file: " + path.string());
        v.entries_.emplace_back(term_names[term_id], tf);
      }
      doc.vector = std::move(v);
    }
    stats.docs_.emplace_hint(stats.docs_.end(), std::move(id), std::move(doc));
  }
  try {
    stats.check_invariants();
  } catch (const std::logic_error& e) {
    throw InputError(fmt::format("corrupt corpus stats file {}: {}", path.string(), e.what()));
  }
  return stats;
}

CorpusStatsBuilder::CorpusStatsBuilder(TokenizationConfig tokenization, std::shared_ptr<const Allowlist> vector_allowlist)
    : tokenization_(std::move(tokenization)), allowlist_(std::move(vector_allowlist)) {}

void CorpusStatsBuilder::add(Document doc) {
  if (doc.doc_id.empty()) throw InputError("document with empty doc_id");
  if (docs_.contains(doc.doc_id)) throw InputError("duplicate doc_id: " + doc.doc_id);

  DocVector vector = DocVector::from_tokens(doc.tokens);
  for (const auto& [term, tf] : vector.entries()) {
    auto it = terms_.find(term);
    if (it == terms_.end()) it = terms_.emplace(term, TermAccumulator{}).first;
    it->second.stats.df += 1;
    it->second.stats.cf += tf;
    it->second.histogram[tf] += 1;
  }
  total_tokens_ += vector.length();

  DocEntry entry;
  entry.length = vector.length();
  if (!allowlist_ || allowlist_->contains(doc.doc_id)) entry.vector = std::move(vector);
  docs_.emplace(std::move(doc.doc_id), std::move(entry));
}

void CorpusStatsBuilder::merge(CorpusStatsBuilder&& other) {
  for (auto& [id, doc] : other.docs_) {
    if (docs_.contains(id)) throw InputError("duplicate doc_id: " + id);
  }
  docs_.merge(other.docs_);
  for (auto& [term, acc] : other.terms_) {
    auto& mine = terms_[term];
    mine.stats.df += acc.stats.df;
    mine.stats.cf += acc.stats.cf;
    for (const auto& [tf, n] : acc.histogram) mine.histogram[tf] += n;
  }
  total_tokens_ += other.total_tokens_;
  other = CorpusStatsBuilder(tokenization_, allowlist_);
}

CorpusStats CorpusStatsBuilder::finish() && {
  CorpusStats stats;
  stats.tokenization_ = std::move(tokenization_);
  stats.num_docs_ = docs_.size();
  stats.total_tokens_ = total_tokens_;
  for (auto& [term, acc] : terms_) {
    TermEntry entry;
    entry.stats = acc.stats;
    entry.tf_histogram.reserve(acc.histogram.size());
    for (const auto& [tf, n] : acc.histogram) entry.tf_histogram.push_back({tf, n});
    stats.terms_.emplace_hint(stats.terms_.end(), term, std::move(entry));
  }
  stats.docs_ = std::move(docs_);
  stats.check_invariants();
  return stats;
}

CorpusStats build_stats(std::vector<Document> documents, const BuildOptions& options) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, documents.size()));
  if (workers <= 1) {
    CorpusStatsBuilder builder(options.tokenization, options.vector_allowlist);
    for (auto& doc : documents) builder.add(std::move(doc));
    return std::move(builder).finish();
  }
  std::vector<CorpusStatsBuilder> partial(workers, CorpusStatsBuilder(options.tokenization, options.vector_allowlist));
  const std::size_t block = (documents.size() + workers - 1) / workers;
  parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(documents.size(), begin + block);
    for (std::size_t i = begin; i < end; ++i) partial[w].add(std::move(documents[i]));
  });
  for (std::size_t w = 1; w < workers; ++w) partial[0].merge(std::move(partial[w]));
  return std::move(partial[0]).finish();
}

} // namespace qpp
