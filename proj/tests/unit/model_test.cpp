#include <gtest/gtest.h>

#include <algorithm>

#include "linkgraph/dataset.hpp"
#include "linkgraph/errors.hpp"
#include "linkgraph/model.hpp"
#include "linkgraph/rng.hpp"

using namespace linkgraph;

namespace {

TokenizerConfig bare() {
  TokenizerConfig c;
  c.stopwords = {};
  c.stemmer = Stemmer::None;
  return c;
}

/// Best positive-class F1 over every threshold in a fine grid and at each
/// observed similarity; the trained theta must reach it.
double brute_force_best_f1(const std::vector<double>& sims, const std::vector<int>& labels) {
  std::vector<double> thetas = {0.0, 1.0};
  for (double s : sims) {
    thetas.push_back(s);
    thetas.push_back(std::max(0.0, s - 1e-9));
  }
  for (int i = 0; i <= 1000; ++i) thetas.push_back(i / 1000.0);
  double best = 0.0;
  for (double t : thetas) best = std::max(best, positive_f1(sims, labels, t));
  return best;
}

}  // namespace

TEST(TrainThreshold, SeparableSetsThetaBetweenClasses) {
  const std::vector<double> sims = {0.9, 0.9, 0.9, 0.1, 0.1, 0.1};
  const std::vector<int> labels = {1, 1, 1, 0, 0, 0};
  const auto c = train_threshold(sims, labels);
  EXPECT_DOUBLE_EQ(c.theta, 0.5);
  EXPECT_DOUBLE_EQ(c.training_f1, 1.0);
  EXPECT_FALSE(c.degenerate);
}

TEST(TrainThreshold, AllEqualSimilaritiesAreDegenerate) {
  const std::vector<double> sims = {0.4, 0.4, 0.4, 0.4};
  const std::vector<int> labels = {1, 0, 1, 0};
  const auto c = train_threshold(sims, labels);
  EXPECT_DOUBLE_EQ(c.theta, 1.0);
  EXPECT_TRUE(c.degenerate);
}

TEST(TrainThreshold, MissingLabelIsInsufficientData) {
  const std::vector<double> sims = {0.4, 0.5};
  EXPECT_THROW(train_threshold(sims, std::vector<int>{1, 1}), InsufficientDataError);
  EXPECT_THROW(train_threshold(sims, std::vector<int>{0, 0}), InsufficientDataError);
}

TEST(TrainThreshold, FourPairFixtureMatchesExhaustiveSearch) {
  // Sorted: 0.2(0) 0.35(1) 0.6(0) 0.8(1). Candidates 0, .275, .475, .7, 1.
  // F1: theta 0 -> 2/3, .275 -> 4/5, .475 -> 1/2, .7 -> 2/3, 1 -> 0.
  const std::vector<double> sims = {0.6, 0.2, 0.8, 0.35};
  const std::vector<int> labels = {0, 0, 1, 1};
  const auto c = train_threshold(sims, labels);
  EXPECT_DOUBLE_EQ(c.theta, 0.275);
  EXPECT_DOUBLE_EQ(c.training_f1, 0.8);
  EXPECT_DOUBLE_EQ(brute_force_best_f1(sims, labels), 0.8);
}

TEST(TrainThreshold, ReappliedThetaReproducesTrainingF1) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng.below(40);
    std::vector<double> sims(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(i % 2);
      sims[i] = std::min(1.0, 0.3 * labels[i] + 0.7 * rng.unit());
      if (rng.below(4) == 0) sims[i] = 0.5;  // force ties
    }
    const auto c = train_threshold(sims, labels);
    EXPECT_DOUBLE_EQ(positive_f1(sims, labels, c.theta), c.training_f1);
    EXPECT_NEAR(c.training_f1, brute_force_best_f1(sims, labels), 1e-12);
    EXPECT_GE(c.theta, 0.0);
    EXPECT_LE(c.theta, 1.0);
  }
}

TEST(TrainThreshold, FromTrainingExamples) {
  const auto index = fit_tfidf({{"P-1", "disk full"}, {"P-2", "disk full"}, {"P-3", "login page"}, {"P-4", "crash"}},
                               bare());
  const std::vector<TrainingExample> train = {{make_pair("P-1", "P-2", PairClass::Dup), 1},
                                              {make_pair("P-3", "P-4", PairClass::NonLink), 0}};
  const auto c = train_threshold(train, index);
  EXPECT_NEAR(c.theta, 0.5, 1e-9);  // midpoint of 0 and a cosine of 1 up to rounding
  EXPECT_EQ(c.predict(0.9), 1);
  EXPECT_EQ(c.predict(0.1), 0);
  EXPECT_THROW(train_threshold(std::span<const TrainingExample>{}, index), InsufficientDataError);
}

TEST(KtopRetrieve, IdenticalTextRanksFirst) {
  const auto index = fit_tfidf({{"q", "disk full error"}, {"a", "disk full error"}, {"b", "disk slow"}, {"c", "ui"}},
                               bare());
  const std::vector<std::string> candidates = {"a", "b", "c", "q"};
  const auto top = ktop_retrieve(index, "q", candidates, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].first, "a");
  EXPECT_NEAR(top[0].second, 1.0, 1e-9);
}

TEST(KtopRetrieve, OrthogonalTiesByAscendingKey) {
  const auto index = fit_tfidf({{"q", "alpha"}, {"c", "gamma"}, {"a", "beta"}, {"b", "delta"}}, bare());
  const std::vector<std::string> candidates = {"c", "b", "a"};
  const auto top = ktop_retrieve(index, "q", candidates, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].first, "a");
  EXPECT_EQ(top[1].first, "b");
  EXPECT_EQ(top[2].first, "c");
}

TEST(KtopRetrieve, MatchesFullSortOracle) {
  const Corpus corpus = {{"q", "disk full error on server"}, {"c1", "disk error"},      {"c2", "server full"},
                         {"c3", "login error page"},        {"c4", "disk full server"}, {"c5", "unrelated text"}};
  const auto index = fit_tfidf(corpus, bare());
  const std::vector<std::string> candidates = {"c1", "c2", "c3", "c4", "c5"};
  std::vector<std::pair<std::string, double>> oracle;
  for (const auto& c : candidates) oracle.emplace_back(c, pair_similarity(index, "q", c));
  std::sort(oracle.begin(), oracle.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto top = ktop_retrieve(index, "q", candidates, k);
    ASSERT_EQ(top.size(), k);
    for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(top[i].first, oracle[i].first);
  }
}

TEST(KtopRetrieve, ErrorsOnZeroKAndUnknownQuery) {
  const auto index = fit_tfidf({{"q", "x"}, {"a", "x"}}, bare());
  const std::vector<std::string> candidates = {"a"};
  EXPECT_THROW(ktop_retrieve(index, "q", candidates, 0), PreconditionError);
  EXPECT_THROW(ktop_retrieve(index, "nope", candidates, 1), UnknownKeyError);
}
