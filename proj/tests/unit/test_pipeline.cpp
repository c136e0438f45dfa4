#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qpp/catalog.hpp"
#include "qpp/error.hpp"
#include "qpp/experiment.hpp"
#include "qpp/experiment_config.hpp"
#include "qpp/topic_selection.hpp"
#include "qpp/trec_io.hpp"
#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;

qpp::Run run_from(const std::string& text, std::string name = "r") {
  std::istringstream in(text);
  return qpp::parse_run(in, "test.run", std::move(name));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(TrecRun, SortsByScoreThenDocId) {
  const auto run = run_from("q1 Q0 b 1 2.0 x\n"
                            "q1 Q0 a 2 2.0 x\n"
                            "q1 Q0 c 3 5.5 x\n"
                            "q2 Q0 z 1 -1 x\n");
  ASSERT_EQ(run.lists.size(), 2u);
  const auto& l = run.lists.at("q1").entries;
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0].doc_id, "c");
  EXPECT_EQ(l[1].doc_id, "a");
  EXPECT_EQ(l[2].doc_id, "b");
  EXPECT_EQ(run.lists.at("q2").entries[0].score, -1.0);
}

TEST(TrecRun, WriteParseRoundTrip) {
  const auto run = run_from("q2 Q0 d9 1 0.1 x\nq1 Q0 d1 1 0.30000000000000004 x\nq1 Q0 d2 2 1e-300 x\n", "sys");
  std::ostringstream out;
  qpp::write_run(out, run);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "q1 Q0 d1 1 0.30000000000000004 sys");
  EXPECT_EQ(run_from(out.str(), "sys"), run);
}

TEST(TrecRun, RejectsMalformedAndDuplicateLines) {
  EXPECT_THROW(run_from("q1 Q0 d1 1 0.5\n"), qpp::InputError);
  EXPECT_THROW(run_from("q1 Q0 d1 one 0.5 x\n"), qpp::InputError);
  EXPECT_THROW(run_from("q1 Q0 d1 1 abc x\n"), qpp::InputError);
  EXPECT_THROW(run_from("q1 Q0 d1 1 nan x\n"), qpp::InputError);
  try {
    run_from("q1 Q0 d1 1 0.5 x\nq1 Q0 d1 2 0.4 x\n");
    FAIL();
  } catch (const qpp::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("test.run:2"), std::string::npos) << e.what();
  }
}

TEST(TrecQrels, LastGradeWinsAndNegativesClamp) {
  std::istringstream in("q1 0 d1 1\nq1 0 d2 -2\nq1 0 d1 3\nq2 0 d5 0\n");
  const auto q = qpp::parse_qrels(in, "q.txt");
  EXPECT_EQ(q.grade("q1", "d1"), 3);
  EXPECT_EQ(q.grade("q1", "d2"), 0);
  EXPECT_FALSE(q.has_relevant("q2"));
  EXPECT_TRUE(q.has_relevant("q1"));
  std::istringstream bad("q1 0 d1\n");
  EXPECT_THROW(qpp::parse_qrels(bad, "bad"), qpp::InputError);
}

TEST(TrecTopics, DuplicateIdIsAnError) {
  std::istringstream ok("q1\triver bank\nq2\tmoney\n");
  const auto t = qpp::parse_topic_texts(ok, "t");
  EXPECT_EQ(t.at("q1"), "river bank");
  std::istringstream dup("q1\ta\nq1\tb\n");
  EXPECT_THROW(qpp::parse_topic_texts(dup, "t"), qpp::InputError);
}

TEST(Catalog, ReadsTsvAndResolvesPaths) {
  std::istringstream in("# id\tpath\ttype\tcollection\n"
                        "bm25\truns/bm25.trec\tTIR\trobust\n"
                        "dense\t/abs/dense.trec\tnir\trobust\n"
                        "ql\tql.trec\tTIR\tdl19\n");
  const auto c = qpp::SystemCatalog::read_tsv(in, "sys.tsv", "/base");
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.at("bm25").run_path, fs::path("/base/runs/bm25.trec"));
  EXPECT_EQ(c.at("dense").run_path, fs::path("/abs/dense.trec"));
  EXPECT_EQ(c.at("dense").type, qpp::RunType::nir);
  EXPECT_EQ(c.collections(), (std::vector<std::string>{"dl19", "robust"}));
  EXPECT_EQ(c.in_collection("robust").size(), 2u);
  EXPECT_THROW(c.at("nope"), qpp::InputError);

  std::istringstream bad_type("x\tx.trec\tHYBRID\tc\n");
  EXPECT_THROW(qpp::SystemCatalog::read_tsv(bad_type, "s", "/"), qpp::InputError);
  std::istringstream dup("x\tx.trec\tTIR\tc\nx\ty.trec\tNIR\tc\n");
  EXPECT_THROW(qpp::SystemCatalog::read_tsv(dup, "s", "/"), qpp::InputError);
}

TEST(ExperimentConfig, KeyValueForm) {
  const auto cfg = qpp::ExperimentConfig::parse("# comment\n"
                                                "collection = robust\n"
                                                "stats = robust.bin\n"
                                                "topics = t.tsv\n"
                                                "qrels = q.txt\n"
                                                "systems = sys.tsv\n"
                                                "gain = exponential\n"
                                                "anova = md2\n"
                                                "omega = direct\n"
                                                "topic_fraction = 0.5\n"
                                                "output = out\n",
                                                "/cfg");
  ASSERT_EQ(cfg.collections.size(), 1u);
  EXPECT_EQ(cfg.collections[0].name, "robust");
  EXPECT_EQ(cfg.collections[0].stats, fs::path("/cfg/robust.bin"));
  EXPECT_EQ(cfg.systems, fs::path("/cfg/sys.tsv"));
  EXPECT_EQ(cfg.gain, qpp::Gain::exponential);
  EXPECT_FALSE(cfg.md1);
  EXPECT_TRUE(cfg.md2);
  EXPECT_EQ(cfg.omega, qpp::OmegaVariant::direct);
  EXPECT_EQ(cfg.topic_fraction, 0.5);
  EXPECT_EQ(cfg.cutoff, 10u);
  EXPECT_FALSE(cfg.predictors.has_value());
  const auto canon = cfg.canonical();
  EXPECT_NE(canon.find("anova = md2"), std::string::npos) << canon;
  EXPECT_NE(canon.find("omega = direct"), std::string::npos) << canon;

  EXPECT_THROW(qpp::ExperimentConfig::parse("gain = cubic\n", "/"), qpp::InputError);
  EXPECT_THROW(qpp::ExperimentConfig::parse("anova = md3\n", "/"), qpp::InputError);
  EXPECT_THROW(qpp::ExperimentConfig::parse("collection = a\nanova = md1\n", "/"), qpp::InputError);
  EXPECT_THROW(qpp::ExperimentConfig::parse("topic_fraction = 0\n", "/"), qpp::InputError);
}

TEST(ExperimentConfig, DottedCollectionKeys) {
  const auto cfg = qpp::ExperimentConfig::parse("collection.robust.stats = r.bin\n"
                                                "collection.robust.topics = r.tsv\n"
                                                "collection.robust.qrels = r.qrels\n"
                                                "collection.dl.stats = d.bin\n"
                                                "collection.dl.topics = d.tsv\n"
                                                "collection.dl.qrels = d.qrels\n"
                                                "systems = sys.tsv\n"
                                                "anova = md1,md2\n",
                                                "/k");
  ASSERT_EQ(cfg.collections.size(), 2u);
  EXPECT_TRUE(cfg.md1);
  EXPECT_TRUE(cfg.md2);
  EXPECT_NE(cfg.canonical().find("anova = md1,md2"), std::string::npos);
}

TEST(ExperimentConfig, JsonFormWithSeveralCollections) {
  const auto cfg = qpp::ExperimentConfig::parse(R"({
    "collections": [
      {"name": "a", "stats": "a.bin", "topics": "a.tsv", "qrels": "a.qrels"},
      {"name": "b", "stats": "b.bin", "topics": "b.tsv", "qrels": "b.qrels"}
    ],
    "systems": "sys.tsv",
    "anova": ["md1", "md2"],
    "cutoff": 20,
    "output": "o"
  })",
                                                "/j");
  ASSERT_EQ(cfg.collections.size(), 2u);
  EXPECT_EQ(cfg.collections[1].qrels, fs::path("/j/b.qrels"));
  EXPECT_EQ(cfg.cutoff, 20u);
  EXPECT_TRUE(cfg.md1);
}

qpp::SystemCatalog two_system_catalog() {
  qpp::SystemCatalog c;
  c.add({"lex", "lex.trec", qpp::RunType::tir, "c"});
  c.add({"neu", "neu.trec", qpp::RunType::nir, "c"});
  return c;
}

TEST(TopicSelection, QuarterOf249Is62) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  qpp::EvalTable eval;
  for (int q = 0; q < 249; ++q) {
    eval.set("lex", "q" + std::to_string(1000 + q), u(rng));
    eval.set("neu", "q" + std::to_string(1000 + q), u(rng));
  }
  const auto sel = qpp::select_semantic_topics(eval, two_system_catalog(), 0.25);
  EXPECT_EQ(sel.selected.size(), 62u);
  EXPECT_EQ(sel.topics.size(), 249u);
  EXPECT_EQ(sel.tir_better + sel.nir_better + sel.ties, 62u);
  for (std::size_t i = 1; i < sel.topics.size(); ++i) {
    EXPECT_GE(std::abs(sel.topics[i - 1].signed_delta), std::abs(sel.topics[i].signed_delta));
  }
  for (std::size_t i = 0; i < sel.topics.size(); ++i) EXPECT_EQ(sel.topics[i].selected, i < 62);
  EXPECT_TRUE(std::is_sorted(sel.selected.begin(), sel.selected.end()));

  const auto all = qpp::select_semantic_topics(eval, two_system_catalog(), 1.0);
  EXPECT_EQ(all.selected.size(), 249u);
  EXPECT_THROW(qpp::select_semantic_topics(eval, two_system_catalog(), 0.0), qpp::InputError);
  EXPECT_THROW(qpp::select_semantic_topics(eval, two_system_catalog(), 1.5), qpp::InputError);
}

TEST(TopicSelection, IdenticalSystemsFallBackToQueryOrder) {
  qpp::EvalTable eval;
  for (const char* q : {"q3", "q1", "q2", "q4"}) {
    eval.set("lex", q, 0.5);
    eval.set("neu", q, 0.5);
  }
  const auto sel = qpp::select_semantic_topics(eval, two_system_catalog(), 0.5);
  EXPECT_EQ(sel.selected, (std::vector<std::string>{"q1", "q2"}));
  EXPECT_EQ(sel.ties, 2u);
  std::ostringstream summary;
  sel.write_summary_csv(summary);
  EXPECT_EQ(summary.str(), "selected,tir_better,nir_better,ties\n2,0,0,2\n");
}

TEST(TopicSelection, NeedsBothRunTypes) {
  qpp::SystemCatalog c;
  c.add({"lex", "lex.trec", qpp::RunType::tir, "c"});
  qpp::EvalTable eval;
  eval.set("lex", "q1", 0.5);
  EXPECT_THROW(qpp::select_semantic_topics(eval, c, 0.5), qpp::InputError);
}

TEST(Experiment, MiniFixtureBundle) {
  const auto fx = qpp::testing::write_mini_fixture(qpp::testing::scratch_dir("pipeline_mini"));
  const auto cfg = qpp::ExperimentConfig::load(fx.config);
  const auto result = qpp::run_experiment(cfg);
  ASSERT_EQ(result.collections.size(), 1u);
  const auto& c = result.collections[0];
  EXPECT_EQ(c.name, "mini");
  EXPECT_EQ(c.eval.size(), 40u);
  EXPECT_EQ(c.sare.size(), 17u * 2u * 20u);
  ASSERT_TRUE(c.md2.has_value());
  EXPECT_EQ(c.md2->table.observations, 17u * 2u * 20u);
  ASSERT_TRUE(c.topics.has_value());
  EXPECT_EQ(c.topics->selected.size(), 5u);
  EXPECT_FALSE(result.md1.has_value());
  for (const char* f : {"predictions.csv", "eval.csv", "sare.csv", "correlations.csv", "anova_md2_mini.csv",
                        "anova_md2_mini.txt", "topic_selection_mini.csv", "manifest.txt"}) {
    EXPECT_TRUE(result.files.count(f)) << f;
  }
  const auto out = fx.dir / "bundle";
  qpp::write_bundle(result.files, out);
  EXPECT_EQ(slurp(out / "sare.csv"), result.files.at("sare.csv"));
  const auto& manifest = result.files.at("manifest.txt");
  EXPECT_NE(manifest.find("[config]"), std::string::npos);
  EXPECT_NE(manifest.find("[outputs]"), std::string::npos);
  EXPECT_EQ(manifest.find(fx.dir.string()), std::string::npos);
}

TEST(Experiment, IncompleteGridFailsBeforeOutput) {
  const auto fx = qpp::testing::write_mini_fixture(qpp::testing::scratch_dir("pipeline_hole"));
  const auto run_path = fx.dir / "run_nir.trec";
  std::istringstream in(slurp(run_path));
  std::ofstream out(run_path, std::ios::trunc);
  for (std::string line; std::getline(in, line);) {
    if (!line.starts_with("q05 ")) out << line << '\n';
  }
  out.close();
  const auto cfg = qpp::ExperimentConfig::load(fx.config);
  try {
    qpp::run_experiment(cfg);
    FAIL() << "expected IncompleteGridError";
  } catch (const qpp::IncompleteGridError& e) {
    EXPECT_FALSE(e.missing().empty());
    for (const auto& m : e.missing()) EXPECT_NE(m.find("neural/q05"), std::string::npos) << m;
  }
  EXPECT_FALSE(fs::exists(fx.dir / "bundle"));
}

} // namespace
