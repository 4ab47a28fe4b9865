#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "topovox/error.hpp"
#include "topovox/forest.hpp"

using namespace topovox;

namespace {

// Two classes with means +-3 sd apart along feature 0; feature 1 is noise.
Dataset clusters(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.n_rows = n;
  d.feature_names = {"a", "b"};
  d.classes = {"left", "right"};
  d.x.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    d.y.push_back(y);
    d.x[i] = (y ? 3.0 : -3.0) + g(rng);
    d.x[n + i] = g(rng);
  }
  return d;
}

bool same_trees(const ForestModel& a, const ForestModel& b) {
  if (a.trees.size() != b.trees.size()) return false;
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    const auto& x = a.trees[t].nodes;
    const auto& y = b.trees[t].nodes;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].feature != y[i].feature || x[i].threshold != y[i].threshold || x[i].left != y[i].left ||
          x[i].right != y[i].right || x[i].label != y[i].label)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST(Forest, SeparatedClustersHaveLowOob) {
  ForestParams p;
  p.n_trees = 200;
  p.seed = 1;
  const auto m = train_forest(clusters(500, 3), p);
  EXPECT_LT(m.oob_error, 0.02);
}

TEST(Forest, PermutedLabelsNearMajorityRate) {
  auto d = clusters(500, 4);
  std::mt19937_64 rng(9);
  std::shuffle(d.y.begin(), d.y.end(), rng);
  ForestParams p;
  p.n_trees = 200;
  p.seed = 2;
  const auto m = train_forest(d, p);
  const auto ones = static_cast<double>(std::count(d.y.begin(), d.y.end(), 1));
  const double majority_error = std::min(ones, 500.0 - ones) / 500.0;
  EXPECT_NEAR(m.oob_error, majority_error, 0.05);
}

TEST(Forest, SameSeedSameForest) {
  const auto d = clusters(200, 5);
  ForestParams p;
  p.n_trees = 50;
  p.seed = 11;
  p.threads = 1;
  const auto a = train_forest(d, p);
  p.threads = 4;
  const auto b = train_forest(d, p);
  EXPECT_EQ(a.oob_error, b.oob_error);
  EXPECT_TRUE(same_trees(a, b));
  EXPECT_EQ(a.importance, b.importance);
  p.seed = 12;
  EXPECT_FALSE(same_trees(a, train_forest(d, p)));
}

TEST(Forest, ImportanceOfUnusedAndSeparatingVariables) {
  auto d = clusters(300, 6);
  d.feature_names.push_back("const");
  d.x.insert(d.x.end(), d.n_rows, 1.0);
  ForestParams p;
  p.n_trees = 100;
  p.mtry = 3;
  const auto m = train_forest(d, p);
  ASSERT_EQ(m.importance.size(), 3u);
  EXPECT_EQ(m.importance[2], 0.0);
  EXPECT_GT(m.importance[0], m.importance[1]);
}

TEST(Forest, SingleClassTargetRejected) {
  auto d = clusters(20, 7);
  std::fill(d.y.begin(), d.y.end(), 0);
  try {
    train_forest(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateTarget);
  }
}

TEST(Forest, OobVotesCoverRows) {
  ForestParams p;
  p.n_trees = 100;
  const auto m = train_forest(clusters(100, 8), p);
  ASSERT_EQ(m.oob_prediction.size(), 100u);
  for (int v : m.oob_prediction) EXPECT_GE(v, 0);
  const double sq[2] = {3.0, 0.0};
  EXPECT_EQ(m.predict(sq), 1);
}
