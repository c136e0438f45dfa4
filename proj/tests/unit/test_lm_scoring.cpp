#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "qpp/error.hpp"
#include "qpp/lm_scoring.hpp"
#include "support/fixtures.hpp"

namespace {

using qpp::Query;

qpp::CorpusStats two_doc_corpus() {
  return qpp::build_stats({qpp::Document{"d1", {"a", "b"}}, qpp::Document{"d2", {"a"}}});
}

qpp::RankedList list_of(std::vector<std::string> ids) {
  qpp::RankedList list{"q", {}};
  double s = 10.0;
  for (auto& id : ids) list.entries.push_back({std::move(id), s--});
  return list;
}

TEST(CollectionProb, HandCounts) {
  const auto c = two_doc_corpus();
  EXPECT_DOUBLE_EQ(qpp::collection_prob(c, "a"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(qpp::collection_prob(c, "b"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(qpp::collection_prob(c, "z"), 1.0 / 4.0);
}

TEST(CollectionProb, EmptyCorpusIsAnError) {
  const qpp::CorpusStats empty;
  EXPECT_THROW(qpp::collection_prob(empty, "a"), qpp::InputError);
}

TEST(DirichletLoglik, HandValues) {
  const auto c = two_doc_corpus();
  const auto& d1 = *c.doc_vector("d1");
  EXPECT_NEAR(qpp::dirichlet_loglik(Query::from_tokens("q", {"a"}), d1, c, 1.0), std::log(5.0 / 9.0), 1e-15);
  EXPECT_NEAR(qpp::dirichlet_loglik(Query::from_tokens("q", {"z"}), d1, c, 1.0), std::log(1.0 / 12.0), 1e-15);
  EXPECT_NEAR(qpp::dirichlet_loglik(Query::from_tokens("q", {"a", "a"}), d1, c, 1.0), 2.0 * std::log(5.0 / 9.0),
              1e-15);
  EXPECT_THROW(qpp::dirichlet_loglik(Query::from_tokens("q", {"a"}), d1, c, 0.0), std::invalid_argument);
}

TEST(DirichletLoglik, ApproachesCollectionModelForLargeMu) {
  const auto stats = qpp::testing::tiny_stats();
  const auto topics = qpp::testing::tiny_topics();
  for (const auto& [id, q] : topics.queries) {
    const double cl = qpp::collection_loglik(q, stats);
    for (const auto& [doc, entry] : stats.docs()) {
      const double ll = qpp::dirichlet_loglik(q, *entry.vector, stats, 1e9);
      EXPECT_NEAR(ll, cl, 1e-6 * std::abs(cl)) << id << " " << doc;
    }
  }
}

TEST(DirichletLoglik, MonotoneInTermFrequency) {
  const auto c = qpp::build_stats({qpp::Document{"x", {"a", "b", "b"}}, qpp::Document{"y", {"a", "a", "b"}}});
  const auto q = Query::from_tokens("q", {"a"});
  EXPECT_LT(qpp::dirichlet_loglik(q, *c.doc_vector("x"), c, 10.0), qpp::dirichlet_loglik(q, *c.doc_vector("y"), c, 10.0));
}

TEST(CollectionLoglik, HandValues) {
  const auto c = two_doc_corpus();
  EXPECT_NEAR(qpp::collection_loglik(Query::from_tokens("q", {"a"}), c), std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(qpp::collection_loglik(Query::from_tokens("q", {"a", "b"}), c), std::log(2.0 / 3.0) + std::log(1.0 / 3.0),
              1e-15);
  EXPECT_NEAR(qpp::collection_loglik(Query::from_tokens("q", {"z"}), c), std::log(0.25), 1e-15);
}

TEST(RescoreTopk, KeepsRunOrderAndTruncates) {
  const auto c = two_doc_corpus();
  const auto q = Query::from_tokens("q", {"a"});
  const auto scored = qpp::rescore_topk(q, list_of({"d1", "d2"}), c, 1.0, 2);
  ASSERT_EQ(scored.size(), 2u);
  EXPECT_EQ(scored[0].doc_id, "d1");
  EXPECT_NEAR(scored[0].score, std::log(5.0 / 9.0), 1e-15);
  EXPECT_EQ(scored[1].doc_id, "d2");
  EXPECT_NEAR(scored[1].score, std::log((1.0 + 2.0 / 3.0) / 2.0), 1e-15);
  // d2 scores higher but stays second
  EXPECT_GT(scored[1].score, scored[0].score);
  EXPECT_EQ(qpp::rescore_topk(q, list_of({"d1", "d2"}), c, 1.0, 1).size(), 1u);
  EXPECT_EQ(qpp::rescore_topk(q, list_of({"d1", "d2"}), c, 1.0, 50).size(), 2u);
}

TEST(RescoreTopk, Errors) {
  const auto c = two_doc_corpus();
  const auto q = Query::from_tokens("q", {"a"});
  EXPECT_THROW(qpp::rescore_topk(q, list_of({}), c, 1.0, 2), qpp::UndefinedResult);
  try {
    qpp::rescore_topk(q, list_of({"d1", "nope"}), c, 1.0, 2);
    FAIL();
  } catch (const qpp::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
  }
}

TEST(Rm1, SingleDocumentIsItsSmoothedModel) {
  const auto c = two_doc_corpus();
  const auto q = Query::from_tokens("q", {"a"});
  const auto rm = qpp::rm1(q, list_of({"d1", "d2"}), c, 1.0, 1, 100);
  // P(a|d1) = (1 + 2/3)/3, P(b|d1) = (1 + 1/3)/3, renormalized over {a, b}
  const double pa = (1.0 + 2.0 / 3.0) / 3.0;
  const double pb = (1.0 + 1.0 / 3.0) / 3.0;
  EXPECT_NEAR(rm.probability("a"), pa / (pa + pb), 1e-15);
  EXPECT_NEAR(rm.probability("b"), pb / (pa + pb), 1e-15);
  EXPECT_NEAR(rm.mass(), 1.0, 1e-12);
}

TEST(Rm1, IdenticalDocumentsMatchSingleDocument) {
  const auto c = qpp::build_stats({qpp::Document{"x", {"a", "b"}}, qpp::Document{"y", {"a", "b"}},
                                   qpp::Document{"z", {"c"}}});
  const auto q = Query::from_tokens("q", {"a"});
  const auto one = qpp::rm1(q, list_of({"x", "y"}), c, 5.0, 1, 100);
  const auto two = qpp::rm1(q, list_of({"x", "y"}), c, 5.0, 2, 100);
  ASSERT_EQ(one.terms.size(), two.terms.size());
  for (std::size_t i = 0; i < one.terms.size(); ++i) {
    EXPECT_EQ(one.terms[i].first, two.terms[i].first);
    EXPECT_NEAR(one.terms[i].second, two.terms[i].second, 1e-15);
  }
}

TEST(Rm1, ClippingRenormalizes) {
  const auto stats = qpp::testing::tiny_stats();
  const auto run = qpp::testing::tiny_run();
  const auto topics = qpp::testing::tiny_topics();
  for (const auto& [id, q] : topics.queries) {
    const auto full = qpp::rm1(q, *run.find(id), stats, 50.0, 5, 1000);
    const auto clipped = qpp::rm1(q, *run.find(id), stats, 50.0, 5, 3);
    EXPECT_FALSE(full.renormalized);
    EXPECT_TRUE(clipped.renormalized);
    EXPECT_EQ(clipped.terms.size(), 3u);
    EXPECT_NEAR(full.mass(), 1.0, 1e-9);
    EXPECT_NEAR(clipped.mass(), 1.0, 1e-9);
    for (const auto& [t, p] : full.terms) EXPECT_GT(p, 0.0);
  }
}

TEST(Rm1, EmptyTopDocumentsAreUndefined) {
  const auto c = qpp::build_stats({qpp::Document{"e", {}}, qpp::Document{"f", {"a"}}});
  EXPECT_THROW(qpp::rm1(Query::from_tokens("q", {"a"}), list_of({"e"}), c, 1.0, 1, 10), qpp::UndefinedResult);
}

TEST(RerankByRm, DominantTermWinsAndTiesUseDocId) {
  const auto c = qpp::build_stats({qpp::Document{"d2", {"x", "y"}}, qpp::Document{"d1", {"y", "y"}},
                                   qpp::Document{"d3", {"x", "y"}}});
  qpp::LanguageModel rm;
  rm.terms = {{"x", 1.0}};
  const std::vector<std::string> ids{"d1", "d3", "d2"};
  const auto ranked = qpp::rerank_by_rm(rm, ids, c, 1.0);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].doc_id, "d2");
  EXPECT_EQ(ranked[1].doc_id, "d3");
  EXPECT_EQ(ranked[2].doc_id, "d1");
  EXPECT_EQ(ranked[0].score, ranked[1].score);
}

TEST(LmScoring, CollectionLoglikNeverPositive) {
  const auto stats = qpp::testing::tiny_stats();
  for (const auto& [id, q] : qpp::testing::tiny_topics().queries) EXPECT_LE(qpp::collection_loglik(q, stats), 0.0);
}

} // namespace
