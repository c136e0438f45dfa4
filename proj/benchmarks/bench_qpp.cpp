#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qpp/anova.hpp"
#include "qpp/anova_models.hpp"
#include "qpp/corpus.hpp"
#include "qpp/predictors.hpp"
#include "qpp/tokenizer.hpp"
#include "qpp/lm_scoring.hpp"

namespace {

std::vector<std::string> vocabulary(std::size_t n) {
  static const char* syllables[] = {"ka", "lo", "mi", "ren", "tus", "ba", "ve", "qui", "dor", "sa"};
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    for (std::size_t k = i + 10; k > 0; k /= 10) w += syllables[k % 10];
    words.push_back(w);
  }
  return words;
}

std::vector<qpp::Document> synthetic_docs(std::size_t count, std::size_t length, std::uint32_t seed) {
  const auto words = vocabulary(2000);
  std::mt19937 rng(seed);
  std::vector<double> weights;
  for (std::size_t r = 1; r <= words.size(); ++r) weights.push_back(1.0 / static_cast<double>(r));
  std::discrete_distribution<std::size_t> zipf(weights.begin(), weights.end());
  std::vector<qpp::Document> docs;
  for (std::size_t d = 0; d < count; ++d) {
    qpp::Document doc{fmt::format("d{:06}", d), {}};
    for (std::size_t t = 0; t < length; ++t) doc.tokens.push_back(words[zipf(rng)]);
    docs.push_back(std::move(doc));
  }
  return docs;
}

void BM_Tokenize(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 200; ++i) text += "The Running connections of relational databases, generalizations and states. ";
  const qpp::Tokenizer tokenizer(qpp::TokenizationConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(tokenizer.tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_BuildStats(benchmark::State& state) {
  const auto docs = synthetic_docs(static_cast<std::size_t>(state.range(0)), 150, 1);
  qpp::BuildOptions options;
  options.tokenization.stopwords.clear();
  for (auto _ : state) benchmark::DoNotOptimize(qpp::build_stats(docs, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildStats)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

class PredictorFixture : public benchmark::Fixture {
public:
  void SetUp(const benchmark::State&) override {
    if (!stats_.num_docs()) {
      qpp::BuildOptions options;
      options.tokenization.stopwords.clear();
      stats_ = qpp::build_stats(synthetic_docs(5000, 150, 2), options);
      const auto words = vocabulary(2000);
      query_ = qpp::Query::from_tokens("q", {words[3], words[40], words[300]});
      list_.query_id = "q";
      for (int r = 0; r < 100; ++r) list_.entries.push_back({fmt::format("d{:06}", r * 37), -5.0 - 0.05 * r});
    }
  }

protected:
  qpp::CorpusStats stats_;
  qpp::Query query_;
  qpp::RankedList list_;
};

BENCHMARK_DEFINE_F(PredictorFixture, DefaultRoster)(benchmark::State& state) {
  const auto spec = qpp::default_roster().at(static_cast<std::size_t>(state.range(0)));
  state.SetLabel(spec.name);
  for (auto _ : state) benchmark::DoNotOptimize(qpp::predict(spec, query_, &list_, stats_));
}
BENCHMARK_REGISTER_F(PredictorFixture, DefaultRoster)->DenseRange(0, 16)->Unit(benchmark::kMicrosecond);

void BM_AnovaMd2Shape(benchmark::State& state) {
  // 19 predictors x 249 topics x 14 systems split 7/7 by run type
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  qpp::FactorialDataset data({"predictor", "topic", "run_type"});
  for (int p = 0; p < 19; ++p) {
    for (int t = 0; t < 249; ++t) {
      for (int s = 0; s < 14; ++s) {
        data.add({fmt::format("p{}", p), fmt::format("t{}", t), s < 7 ? "TIR" : "NIR"}, u(rng));
      }
    }
  }
  const auto terms = qpp::md2_terms();
  for (auto _ : state) benchmark::DoNotOptimize(qpp::fit_factorial(data, terms));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_AnovaMd2Shape)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
