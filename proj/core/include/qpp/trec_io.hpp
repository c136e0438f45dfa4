#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "qpp/evaluation.hpp"
#include "qpp/run.hpp"
#include "qpp/tokenizer.hpp"
#include "qpp/topics.hpp"

namespace qpp {

/// Whitespace-separated `qid Q0 docid rank score tag` lines. Each list is
/// re-sorted by descending score then ascending doc_id; the file's rank
/// column is ignored. Duplicate (qid, docid) pairs and malformed lines throw
/// InputError with the line number.
Run parse_run(std::istream& in, const std::string& source, std::string name);
Run parse_run(const std::filesystem::path& path, std::string name);

/// Writes lists in query_id order with ranks 1..n and round-trip scores.
void write_run(std::ostream& out, const Run& run, std::string_view tag = {});

/// `qid 0 docid grade` lines. A repeated pair keeps the last grade and a
/// negative grade is clamped to 0; both log a warning.
Qrels parse_qrels(std::istream& in, const std::string& source);
Qrels parse_qrels(const std::filesystem::path& path);

/// `qid<TAB>text` lines; a repeated id throws InputError.
std::map<std::string, std::string, std::less<>> parse_topic_texts(std::istream& in, const std::string& source);
TopicSet parse_topics(const std::filesystem::path& path, const TokenizationConfig& tokenization);

} // namespace qpp
