#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qpp/corpus.hpp"
#include "qpp/run.hpp"
#include "qpp/topics.hpp"

namespace qpp::testing {

std::filesystem::path data_dir();

/// No stopword removal, no stemming: plain lowercase words.
TokenizationConfig plain_tokenization();

/// The bundled tiny corpus (tests/data/tiny).
CorpusStats tiny_stats();
TopicSet tiny_topics();
Run tiny_run();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

struct MiniFixture {
  std::filesystem::path dir;
  std::filesystem::path config;
};

/// Writes a 1,000-document corpus (indexed to stats.bin), 20 topics, qrels,
/// one TIR and one NIR run and a matching experiment config into `dir`.
/// Everything derives from raw mt19937 output, so the files are identical
/// across platforms for a given seed.
MiniFixture write_mini_fixture(const std::filesystem::path& dir, std::uint32_t seed = 20240611);

} // namespace qpp::testing
