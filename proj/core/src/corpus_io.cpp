#include "qpp/corpus_io.hpp"

#include <nlohmann/json.hpp>
#include <fmt/format.h>

#include "qpp/error.hpp"
#include "qpp/parallel.hpp"

namespace qpp {

namespace {

constexpr std::size_t kBatchSize = 4096;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return CorpusFormat::jsonl;
  if (name == "trec" || name == "trectext" || name == "trec_text") return CorpusFormat::trec_text;
  throw InputError(fmt::format("unknown corpus format '{}' (expected jsonl or trec)", name));
}

void read_jsonl_corpus(std::istream& in, const RawDocumentSink& sink) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(fmt::format("corpus line {}: invalid JSON ({})", line_no, e.what()));
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("contents")) {
      throw InputError(fmt::format("corpus line {}: expected an object with \"id\" and \"contents\"", line_no));
    }
    const auto& id = obj["id"];
    const auto& contents = obj["contents"];
    if (!contents.is_string() || !(id.is_string() || id.is_number_integer())) {
      throw InputError(fmt::format("corpus line {}: \"id\" and \"contents\" must be strings", line_no));
    }
    RawDocument doc;
    doc.doc_id = id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>());
    doc.contents = contents.get<std::string>();
    if (doc.doc_id.empty()) throw InputError(fmt::format("corpus line {}: empty id", line_no));
    sink(std::move(doc));
  }
}

void read_trec_text_corpus(std::istream& in, const RawDocumentSink& sink) {
  std::string line;
  std::size_t line_no = 0;
  bool in_doc = false;
  bool in_text = false;
  std::size_t doc_start = 0;
  RawDocument doc;

  const auto extract = [](std::string_view s, std::string_view open, std::string_view close) -> std::string {
    const auto b = s.find(open);
    const auto e = s.find(close, b == std::string_view::npos ? 0 : b + open.size());
    if (b == std::string_view::npos || e == std::string_view::npos) return {};
    return std::string(trim(s.substr(b + open.size(), e - b - open.size())));
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = line;
    while (!rest.empty()) {
      if (!in_doc) {
        const auto p = rest.find("<DOC>");
        if (p == std::string_view::npos) break;
        in_doc = true;
        doc_start = line_no;
        doc = RawDocument{};
        rest.remove_prefix(p + 5);
        continue;
      }
      if (in_text) {
        const auto p = rest.find("</TEXT>");
        if (p == std::string_view::npos) {
          doc.contents.append(rest);
          doc.contents.push_back('\n');
          break;
        }
        doc.contents.append(rest.substr(0, p));
        doc.contents.push_back('\n');
        in_text = false;
        rest.remove_prefix(p + 7);
        continue;
      }
      const auto docno = rest.find("<DOCNO>");
      const auto text = rest.find("<TEXT>");
      const auto end = rest.find("</DOC>");
      const auto first = std::min({docno, text, end});
      if (first == std::string_view::npos) break;
      if (first == docno) {
        doc.doc_id = extract(rest, "<DOCNO>", "</DOCNO>");
        if (doc.doc_id.empty()) throw InputError(fmt::format("corpus line {}: malformed <DOCNO>", line_no));
        rest.remove_prefix(rest.find("</DOCNO>") + 8);
      } else if (first == text) {
        in_text = true;
        rest.remove_prefix(text + 6);
      } else {
        if (doc.doc_id.empty()) {
          throw InputError(fmt::format("corpus line {}: <DOC> starting at line {} has no <DOCNO>", line_no, doc_start));
        }
        sink(std::move(doc));
        in_doc = false;
        rest.remove_prefix(end + 6);
      }
    }
  }
  if (in_doc) throw InputError(fmt::format("corpus: <DOC> starting at line {} is not closed", doc_start));
}

CorpusStats index_corpus(std::istream& in, CorpusFormat format, const BuildOptions& options) {
  const Tokenizer tokenizer(options.tokenization);
  CorpusStatsBuilder builder(options.tokenization, options.vector_allowlist);
  std::vector<RawDocument> batch;
  batch.reserve(kBatchSize);

  const auto drain = [&] {
    std::vector<Document> docs(batch.size());
    parallel_for(batch.size(), options.threads, [&](std::size_t i) {
      docs[i].doc_id = std::move(batch[i].doc_id);
      docs[i].tokens = tokenizer.tokenize(batch[i].contents);
    });
    for (auto& d : docs) builder.add(std::move(d));
    batch.clear();
  };
  const RawDocumentSink sink = [&](RawDocument&& doc) {
    batch.push_back(std::move(doc));
    if (batch.size() >= kBatchSize) drain();
  };

  if (format == CorpusFormat::jsonl) {
    read_jsonl_corpus(in, sink);
  } else {
    read_trec_text_corpus(in, sink);
  }
  drain();
  return std::move(builder).finish();
}

} // namespace qpp
