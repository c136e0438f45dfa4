#pragma once

#include <functional>
#include <istream>
#include <string>
#include <string_view>

#include "qpp/corpus.hpp"

namespace qpp {

/// Untokenized document as it appears in a corpus file.
struct RawDocument {
  std::string doc_id;
  std::string contents;
};

enum class CorpusFormat { jsonl, trec_text };

CorpusFormat parse_corpus_format(std::string_view name);

using RawDocumentSink = std::function<void(RawDocument&&)>;

/// One JSON object per line with string fields "id" and "contents".
void read_jsonl_corpus(std::istream& in, const RawDocumentSink& sink);

/// <DOC><DOCNO>id</DOCNO> ... <TEXT>body</TEXT> ... </DOC> records. Every
/// TEXT block of a record is concatenated; other tags are ignored.
void read_trec_text_corpus(std::istream& in, const RawDocumentSink& sink);

/// Streams a corpus file through the tokenizer into CorpusStats.
/// Tokenization runs on `options.threads` workers per batch.
CorpusStats index_corpus(std::istream& in, CorpusFormat format, const BuildOptions& options);

} // namespace qpp
