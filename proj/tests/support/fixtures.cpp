#include "support/fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qpp/corpus_io.hpp"
#include "qpp/error.hpp"
#include "qpp/trec_io.hpp"

namespace qpp::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(QPPWB_TEST_DATA); }

TokenizationConfig plain_tokenization() {
  TokenizationConfig cfg;
  cfg.remove_stopwords = false;
  cfg.stem = false;
  cfg.stopwords.clear();
  return cfg;
}

CorpusStats tiny_stats() {
  std::ifstream in(data_dir() / "tiny" / "corpus.jsonl");
  if (!in) throw InputError("tiny corpus missing");
  BuildOptions options;
  options.tokenization = plain_tokenization();
  return index_corpus(in, CorpusFormat::jsonl, options);
}

TopicSet tiny_topics() { return parse_topics(data_dir() / "tiny" / "topics.tsv", plain_tokenization()); }

Run tiny_run() { return parse_run(data_dir() / "tiny" / "run.trec", "tiny"); }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / fmt::format("qppwb_test_{}", name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

namespace {

// Uniform integer in [0, n) from raw engine output; the standard
// distributions are implementation-defined.
std::uint32_t draw(std::mt19937& rng, std::uint32_t n) { return static_cast<std::uint32_t>(rng() % n); }

double unit(std::mt19937& rng) { return static_cast<double>(rng()) / 4294967296.0; }

std::string word(std::uint32_t i) {
  static const char* syllables[] = {"ka", "lo", "mi", "ne", "ru", "sa", "to", "vi", "ze", "po"};
  std::string w;
  w += syllables[i % 10];
  w += syllables[(i / 10) % 10];
  w += syllables[(i / 100) % 10];
  return w;
}

} // namespace

MiniFixture write_mini_fixture(const fs::path& dir, std::uint32_t seed) {
  constexpr std::uint32_t kDocs = 1000;
  constexpr std::uint32_t kVocab = 600;
  constexpr std::uint32_t kQueries = 20;
  constexpr std::uint32_t kDepth = 100;
  fs::create_directories(dir);
  std::mt19937 rng(seed);

  // Zipf-like term sampling via a cumulative table.
  std::vector<double> cumulative(kVocab);
  double total = 0.0;
  for (std::uint32_t i = 0; i < kVocab; ++i) {
    total += 1.0 / (1.0 + i);
    cumulative[i] = total;
  }
  const auto sample_term = [&] {
    const double u = unit(rng) * total;
    return static_cast<std::uint32_t>(std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
  };

  std::vector<std::vector<std::uint32_t>> docs(kDocs);
  {
    std::ofstream out(dir / "corpus.jsonl");
    for (std::uint32_t d = 0; d < kDocs; ++d) {
      const std::uint32_t len = 20 + draw(rng, 60);
      std::string text;
      for (std::uint32_t t = 0; t < len; ++t) {
        const std::uint32_t term = sample_term();
        docs[d].push_back(term);
        if (t) text += ' ';
        text += word(term);
      }
      out << fmt::format("{{\"id\": \"doc{:04}\", \"contents\": \"{}\"}}\n", d, text);
    }
  }
  {
    std::ifstream in(dir / "corpus.jsonl");
    BuildOptions options;
    options.tokenization = plain_tokenization();
    index_corpus(in, CorpusFormat::jsonl, options).save(dir / "stats.bin");
  }

  std::vector<std::vector<std::uint32_t>> queries(kQueries);
  {
    std::ofstream out(dir / "topics.tsv");
    for (std::uint32_t q = 0; q < kQueries; ++q) {
      const std::uint32_t len = 2 + draw(rng, 3);
      std::string text;
      for (std::uint32_t i = 0; i < len; ++i) {
        const std::uint32_t term = 10 + draw(rng, 200);
        queries[q].push_back(term);
        if (i) text += ' ';
        text += word(term);
      }
      out << fmt::format("q{:02}\t{}\n", q, text);
    }
  }

  std::ofstream qrels(dir / "qrels.txt");
  std::ofstream tir(dir / "run_tir.trec");
  std::ofstream nir(dir / "run_nir.trec");
  for (std::uint32_t q = 0; q < kQueries; ++q) {
    std::vector<std::pair<double, std::uint32_t>> match(kDocs);
    for (std::uint32_t d = 0; d < kDocs; ++d) {
      double m = 0.0;
      for (std::uint32_t term : queries[q]) {
        m += static_cast<double>(std::count(docs[d].begin(), docs[d].end(), term));
      }
      match[d] = {m, d};
    }
    for (std::uint32_t d = 0; d < kDocs; ++d) {
      if (match[d].first >= 2.0 || (match[d].first >= 1.0 && draw(rng, 4) == 0)) {
        qrels << fmt::format("q{:02} 0 doc{:04} {}\n", q, d, match[d].first >= 3.0 ? 2 : 1);
      }
    }
    // TIR: term matches plus mild noise. NIR: a noisier view of the same signal.
    std::vector<std::pair<double, std::uint32_t>> lexical(kDocs);
    std::vector<std::pair<double, std::uint32_t>> neural(kDocs);
    for (std::uint32_t d = 0; d < kDocs; ++d) {
      lexical[d] = {match[d].first + 0.5 * unit(rng), d};
      neural[d] = {0.6 * match[d].first + 2.0 * unit(rng), d};
    }
    const auto emit = [&](std::ofstream& out, std::vector<std::pair<double, std::uint32_t>>& scored,
                          const char* tag) {
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      for (std::uint32_t r = 0; r < kDepth; ++r) {
        out << fmt::format("q{:02} Q0 doc{:04} {} {:.6f} {}\n", q, scored[r].second, r + 1, scored[r].first, tag);
      }
    };
    emit(tir, lexical, "lexical");
    emit(nir, neural, "neural");
  }
  qrels.close();
  tir.close();
  nir.close();

  {
    std::ofstream out(dir / "systems.tsv");
    out << "# id\trun\ttype\tcollection\n";
    out << "lexical\trun_tir.trec\tTIR\tmini\n";
    out << "neural\trun_nir.trec\tNIR\tmini\n";
  }
  MiniFixture fx{dir, dir / "experiment.cfg"};
  {
    std::ofstream out(fx.config);
    out << "collection = mini\n"
           "stats = stats.bin\n"
           "topics = topics.tsv\n"
           "qrels = qrels.txt\n"
           "systems = systems.tsv\n"
           "cutoff = 10\n"
           "anova = md2\n"
           "topic_fraction = 0.25\n"
           "threads = 1\n"
           "output = bundle\n";
  }
  return fx;
}

} // namespace qpp::testing
