#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qpp/error.hpp"
#include "qpp/predictors.hpp"
#include "qpp/roster.hpp"
#include "support/fixtures.hpp"

namespace {

using qpp::Aggregator;
using qpp::Query;

// N=4 documents; df(a)=2, df(b)=1.
qpp::CorpusStats four_docs() {
  return qpp::build_stats({qpp::Document{"d1", {"a", "c"}}, qpp::Document{"d2", {"a"}},
                           qpp::Document{"d3", {"b", "c"}}, qpp::Document{"d4", {"c"}}});
}

qpp::CorpusStats two_doc_corpus() {
  return qpp::build_stats({qpp::Document{"d1", {"a", "b"}}, qpp::Document{"d2", {"a"}}});
}

TEST(PreRetrieval, IdfHandValues) {
  const auto c = four_docs();
  EXPECT_NEAR(qpp::idf_agg(Query::from_tokens("q", {"a"}), c, Aggregator::avg), std::log(2.0), 1e-15);
  EXPECT_EQ(qpp::idf_agg(Query::from_tokens("q", {"a", "a"}), c, Aggregator::avg),
            qpp::idf_agg(Query::from_tokens("q", {"a"}), c, Aggregator::avg));
  EXPECT_NEAR(qpp::idf_agg(Query::from_tokens("q", {"a", "b"}), c, Aggregator::max), std::log(5.0 / 1.5), 1e-15);
  // OOV uses df = 0
  EXPECT_NEAR(qpp::term_idf(c, "zz"), std::log(5.0 / 0.5), 1e-15);
  EXPECT_NEAR(qpp::term_idf(c, "a", qpp::IdfVariant::classic), std::log(2.0), 1e-15);
  EXPECT_NEAR(qpp::term_idf(c, "zz", qpp::IdfVariant::classic), std::log(4.0), 1e-15);
}

TEST(PreRetrieval, IctfHandValues) {
  const auto c = two_doc_corpus();
  EXPECT_NEAR(qpp::ictf_agg(Query::from_tokens("q", {"a"}), c, Aggregator::avg), std::log(1.5), 1e-15);
  EXPECT_EQ(qpp::ictf_agg(Query::from_tokens("q", {"a"}), c, Aggregator::avg),
            qpp::ictf_agg(Query::from_tokens("q", {"a"}), c, Aggregator::max));
  EXPECT_NEAR(qpp::ictf_agg(Query::from_tokens("q", {"a", "b"}), c, Aggregator::max), std::log(3.0), 1e-15);
}

TEST(PreRetrieval, ScqHandValues) {
  const auto c = two_doc_corpus();
  const double a = (1.0 + std::log(2.0)) * std::log(2.0);
  EXPECT_NEAR(qpp::scq_agg(Query::from_tokens("q", {"a"}), c, Aggregator::avg), a, 1e-15);
  EXPECT_EQ(qpp::scq_agg(Query::from_tokens("q", {"zz"}), c, Aggregator::avg), 0.0);
  EXPECT_NEAR(qpp::scq_agg(Query::from_tokens("q", {"a", "zz"}), c, Aggregator::avg), a / 2.0, 1e-15);
}

TEST(PreRetrieval, VarDegenerateCases) {
  const auto c = qpp::build_stats({qpp::Document{"x", {"s", "s", "u"}}, qpp::Document{"y", {"s", "s"}},
                                   qpp::Document{"z", {"w"}}});
  EXPECT_EQ(qpp::term_var(c, "s"), 0.0); // identical tf everywhere
  EXPECT_EQ(qpp::term_var(c, "u"), 0.0); // df = 1
  EXPECT_EQ(qpp::term_var(c, "nope"), 0.0);
}

TEST(PreRetrieval, VarMatchesBruteForce) {
  // tf of t in {1, 2, 4}
  const auto c = qpp::build_stats({qpp::Document{"x", {"t"}}, qpp::Document{"y", {"t", "t"}},
                                   qpp::Document{"z", {"t", "t", "t", "t"}}, qpp::Document{"w", {"o"}}});
  const double idf = std::log(5.0 / 3.5);
  const double w[3] = {idf, (1 + std::log(2.0)) * idf, (1 + std::log(4.0)) * idf};
  const double m = (w[0] + w[1] + w[2]) / 3.0;
  const double var = ((w[0] - m) * (w[0] - m) + (w[1] - m) * (w[1] - m) + (w[2] - m) * (w[2] - m)) / 3.0;
  EXPECT_NEAR(qpp::term_var(c, "t"), var, 1e-15);
}

TEST(PreRetrieval, ScsHandValues) {
  const auto c = two_doc_corpus();
  EXPECT_NEAR(qpp::scs(Query::from_tokens("q", {"a"}), c), std::log(1.5), 1e-15);
  // empirical distribution equal to the collection: a twice, b once
  EXPECT_NEAR(qpp::scs(Query::from_tokens("q", {"a", "a", "b"}), c), 0.0, 1e-15);
  const double kl = 0.5 * std::log(0.5 / (2.0 / 3.0)) + 0.5 * std::log(0.5 / (1.0 / 3.0));
  EXPECT_NEAR(qpp::scs(Query::from_tokens("q", {"a", "b"}), c), kl, 1e-15);
}

TEST(ScoreKernels, NqcWigSmvHandValues) {
  const std::vector<double> s{-1.0, -3.0};
  EXPECT_DOUBLE_EQ(qpp::nqc_from_scores(s, -2.0), 0.5);
  const std::vector<double> flat{-2.0, -2.0, -2.0};
  EXPECT_EQ(qpp::nqc_from_scores(flat, -5.0), 0.0);
  const std::vector<double> doubled{-2.0, -6.0};
  EXPECT_DOUBLE_EQ(qpp::nqc_from_scores(doubled, -2.0), 1.0);
  EXPECT_THROW(qpp::nqc_from_scores(s, 0.0), qpp::UndefinedResult);
  EXPECT_THROW(qpp::nqc_from_scores(std::vector<double>{-1.0}, -1.0), qpp::UndefinedResult);

  const std::vector<double> w{-1.0, -2.0};
  EXPECT_DOUBLE_EQ(qpp::wig_from_scores(w, -4.0, 1), 2.5);
  EXPECT_DOUBLE_EQ(qpp::wig_from_scores(w, -4.0, 4), 1.25);
  EXPECT_EQ(qpp::wig_from_scores(std::vector<double>{-4.0, -4.0}, -4.0, 2), 0.0);

  const double e = std::exp(1.0);
  const std::vector<double> pos{1.0, e};
  const double mean = (1.0 + e) / 2.0;
  const double expected = (std::abs(std::log(1.0 / mean)) + e * std::abs(std::log(e / mean))) / 2.0;
  EXPECT_NEAR(qpp::smv_from_positive(pos, -1.0), expected, 1e-15);
  EXPECT_EQ(qpp::smv_from_positive(std::vector<double>{2.0, 2.0}, -1.0), 0.0);
  EXPECT_EQ(qpp::smv_from_scores(std::vector<double>{-3.0}, -1.0, qpp::SmvPositivity::shift), 0.0);
}

TEST(ScoreKernels, SmvShiftAndExpModes) {
  const std::vector<double> s{-2.0, -3.0, -5.0};
  const std::vector<double> shifted{3.0 + qpp::kSmvShiftEpsilon, 2.0 + qpp::kSmvShiftEpsilon, qpp::kSmvShiftEpsilon};
  EXPECT_DOUBLE_EQ(qpp::smv_from_scores(s, -4.0, qpp::SmvPositivity::shift), qpp::smv_from_positive(shifted, -4.0));
  const std::vector<double> exps{std::exp(-2.0), std::exp(-3.0), std::exp(-5.0)};
  EXPECT_DOUBLE_EQ(qpp::smv_from_scores(s, -4.0, qpp::SmvPositivity::exp), qpp::smv_from_positive(exps, -4.0));
}

TEST(ScoreKernels, UefIdentityAndReversal) {
  const std::vector<double> orig{-3.1, -4.7, -5.2, -8.0};
  EXPECT_EQ(qpp::uef_from_scores(orig, orig, 0.37), 0.37);
  std::vector<double> reversed;
  for (double v : orig) reversed.push_back(-2.0 * v + 1.0);
  EXPECT_NEAR(qpp::uef_from_scores(orig, reversed, 0.37), -0.37, 1e-15);
  EXPECT_THROW(qpp::uef_from_scores(std::vector<double>{1.0}, std::vector<double>{1.0}, 1.0), qpp::UndefinedResult);
}

TEST(Clarity, ZeroWhenModelEqualsCollection) {
  const auto c = two_doc_corpus();
  qpp::LanguageModel rm;
  rm.terms = {{"a", 2.0 / 3.0}, {"b", 1.0 / 3.0}};
  EXPECT_NEAR(qpp::clarity_from_model(rm, c), 0.0, 1e-15);
  qpp::LanguageModel rare;
  rare.terms = {{"b", 1.0}};
  qpp::LanguageModel common;
  common.terms = {{"a", 1.0}};
  EXPECT_GT(qpp::clarity_from_model(rare, c), qpp::clarity_from_model(common, c));
}

class TinyOracle : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    stats_ = new qpp::CorpusStats(qpp::testing::tiny_stats());
    topics_ = new qpp::TopicSet(qpp::testing::tiny_topics());
    run_ = new qpp::Run(qpp::testing::tiny_run());
    std::ifstream in(qpp::testing::data_dir() / "tiny" / "expected.json");
    expected_ = new nlohmann::json(nlohmann::json::parse(in));
  }
  static void TearDownTestSuite() {
    delete stats_;
    delete topics_;
    delete run_;
    delete expected_;
  }
  static qpp::CorpusStats* stats_;
  static qpp::TopicSet* topics_;
  static qpp::Run* run_;
  static nlohmann::json* expected_;
};

qpp::CorpusStats* TinyOracle::stats_ = nullptr;
qpp::TopicSet* TinyOracle::topics_ = nullptr;
qpp::Run* TinyOracle::run_ = nullptr;
nlohmann::json* TinyOracle::expected_ = nullptr;

TEST_F(TinyOracle, EveryPredictorMatchesBruteForce) {
  const auto roster = qpp::load_roster(qpp::testing::data_dir() / "tiny" / "roster.txt");
  ASSERT_EQ(roster.size(), 17u);
  for (const auto& spec : roster) {
    ASSERT_TRUE(expected_->contains(spec.name)) << spec.name;
    for (const auto& [qid, q] : topics_->queries) {
      const double got = qpp::predict(spec, q, run_->find(qid), *stats_);
      const double want = (*expected_)[spec.name][qid].get<double>();
      EXPECT_NEAR(got, want, 1e-9) << spec.name << " " << qid;
    }
  }
}

TEST_F(TinyOracle, PreRetrievalIgnoresRunContents) {
  qpp::Run other = *run_;
  other.name = "other";
  for (auto& [qid, list] : other.lists) std::reverse(list.entries.begin(), list.entries.end());
  const std::vector<qpp::Run> runs{*run_, other};
  for (const auto& spec : qpp::default_roster()) {
    if (spec.family() != qpp::PredictorFamily::pre) continue;
    const auto result = qpp::run_predictor(spec, *topics_, runs, *stats_);
    ASSERT_TRUE(result.complete());
    EXPECT_EQ(result.table.size(), 2 * topics_->size());
    for (const auto& qid : topics_->ids()) {
      EXPECT_EQ(result.table.find(spec.name, "tiny", qid), result.table.find(spec.name, "other", qid));
    }
  }
}

TEST_F(TinyOracle, ScoreDistributionPredictorsIgnoreOrderWithinTopK) {
  const auto roster = qpp::load_roster(qpp::testing::data_dir() / "tiny" / "roster.txt");
  for (const auto& spec : roster) {
    if (spec.kind != qpp::PredictorKind::nqc && spec.kind != qpp::PredictorKind::wig &&
        spec.kind != qpp::PredictorKind::smv) {
      continue;
    }
    for (const auto& [qid, q] : topics_->queries) {
      qpp::RankedList list = *run_->find(qid);
      const double before = qpp::predict(spec, q, &list, *stats_);
      std::reverse(list.entries.begin(), list.entries.begin() + std::min<std::size_t>(spec.params.k, list.size()));
      EXPECT_NEAR(qpp::predict(spec, q, &list, *stats_), before, 1e-12) << spec.name << " " << qid;
    }
  }
}

TEST_F(TinyOracle, RenamingDocumentsChangesNothing) {
  // every id gets the same prefix, so the relative order of ids is kept
  std::vector<qpp::Document> docs;
  for (const auto& [id, entry] : stats_->docs()) {
    qpp::Document d{"renamed-" + id, {}};
    for (const auto& [term, tf] : entry.vector->entries()) {
      for (std::uint32_t i = 0; i < tf; ++i) d.tokens.push_back(term);
    }
    docs.push_back(std::move(d));
  }
  qpp::BuildOptions options;
  options.tokenization = qpp::testing::plain_tokenization();
  const auto renamed = qpp::build_stats(docs, options);
  qpp::Run run = *run_;
  for (auto& [qid, list] : run.lists) {
    for (auto& e : list.entries) e.doc_id = "renamed-" + e.doc_id;
  }
  const auto roster = qpp::load_roster(qpp::testing::data_dir() / "tiny" / "roster.txt");
  for (const auto& spec : roster) {
    for (const auto& [qid, q] : topics_->queries) {
      EXPECT_NEAR(qpp::predict(spec, q, run.find(qid), renamed), qpp::predict(spec, q, run_->find(qid), *stats_),
                  1e-12)
          << spec.name;
    }
  }
}

TEST_F(TinyOracle, ClarityNonNegativeWithoutClipping) {
  for (const auto& [qid, q] : topics_->queries) {
    EXPECT_GE(qpp::clarity(q, *run_->find(qid), *stats_, 5, 100000, 50.0), -1e-9);
  }
}

TEST_F(TinyOracle, MissingListsBecomeMissingCells) {
  qpp::Run partial = *run_;
  partial.lists.erase("q3");
  const std::vector<qpp::Run> runs{partial};
  const auto result = qpp::run_predictor(qpp::PredictorSpec::post(qpp::PredictorKind::wig, {5, 50.0}), *topics_, runs,
                                         *stats_);
  EXPECT_EQ(result.table.size(), topics_->size() - 1);
  ASSERT_EQ(result.missing.size(), 1u);
  EXPECT_NE(result.missing[0].find("q3"), std::string::npos);
}

TEST_F(TinyOracle, ThreadCountDoesNotChangeScores) {
  const std::vector<qpp::Run> runs{*run_};
  for (const auto& spec : qpp::load_roster(qpp::testing::data_dir() / "tiny" / "roster.txt")) {
    EXPECT_EQ(qpp::run_predictor(spec, *topics_, runs, *stats_, 1).table,
              qpp::run_predictor(spec, *topics_, runs, *stats_, 3).table);
  }
}

TEST(PredictorSpec, DefaultRosterNamesAndParams) {
  const auto roster = qpp::default_roster();
  std::vector<std::string> names;
  for (const auto& s : roster) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"IDF-avg", "IDF-max", "ICTF-avg", "ICTF-max", "SCQ-avg", "SCQ-max",
                                             "VAR-avg", "VAR-max", "SCS", "Clarity", "NQC", "SMV", "WIG",
                                             "UEF-Clarity", "UEF-NQC", "UEF-SMV", "UEF-WIG"}));
  for (const auto& s : roster) {
    EXPECT_NO_THROW(s.validate()) << s.name;
    if (s.kind == qpp::PredictorKind::wig) {
      EXPECT_EQ(s.params.k, 5u);
    }
    if (s.kind == qpp::PredictorKind::clarity) {
      EXPECT_EQ(s.params.k, 100u);
    }
    if (s.kind == qpp::PredictorKind::uef) {
      EXPECT_EQ(s.params.k, 100u);
      ASSERT_TRUE(s.base);
    }
  }
}

TEST(PredictorSpec, ValidationRejectsInconsistentSpecs) {
  auto uef = qpp::PredictorSpec::post(qpp::PredictorKind::nqc, {});
  uef.kind = qpp::PredictorKind::uef;
  EXPECT_THROW(uef.validate(), std::invalid_argument); // no base
  auto k1 = qpp::PredictorSpec::uef(qpp::PredictorSpec::post(qpp::PredictorKind::nqc, {}), {1, 1000.0});
  EXPECT_THROW(k1.validate(), std::invalid_argument);
  auto zero_k = qpp::PredictorSpec::post(qpp::PredictorKind::wig, {0, 1000.0});
  EXPECT_THROW(zero_k.validate(), std::invalid_argument);
}

TEST(Roster, RoundTripsThroughCanonicalForm) {
  for (const auto& spec : qpp::default_roster()) {
    const auto line = qpp::format_roster_line(spec);
    EXPECT_TRUE(qpp::same_spec(qpp::parse_roster_line(line), spec)) << line;
  }
}

TEST(Roster, ParsesOptionsAndRejectsDuplicates) {
  const auto spec = qpp::parse_roster_line("SMV k=20 mu=500 smv=exp name=SMV-exp");
  EXPECT_EQ(spec.name, "SMV-exp");
  EXPECT_EQ(spec.params.k, 20u);
  EXPECT_EQ(spec.params.mu, 500.0);
  EXPECT_EQ(spec.params.smv, qpp::SmvPositivity::exp);
  std::istringstream dup("IDF avg\n# comment\n\nIDF avg\n");
  EXPECT_THROW(qpp::read_roster(dup, "dup"), qpp::InputError);
  EXPECT_THROW(qpp::parse_roster_line("Bogus avg"), std::invalid_argument);
}

} // namespace
