/*
 * Copyright 2026 The FogLab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "foglab/trees.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace foglab::trees {
namespace {

using ::foglab::testing::ErrorKindOf;

FeatureMatrix Column(std::vector<double> v) {
  const std::size_t n = v.size();
  return FeatureMatrix(n, 1, std::move(v));
}

// Integer-valued features so that duplicate values and gain ties occur.
void RandomProblem(std::mt19937_64& rng, std::size_t n, std::size_t d,
                   FeatureMatrix* x, std::vector<int>* y) {
  *x = FeatureMatrix(n, d);
  y->assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < d; ++f) (*x)(i, f) = double(rng() % 7);
    (*y)[i] = static_cast<int>(rng() % 2);
  }
  (*y)[0] = 0;
  (*y)[1] = 1;
}

// Continuous two-class problem with a noisy linear boundary.
void NoisyProblem(std::uint64_t seed, std::size_t n, std::size_t d,
                  FeatureMatrix* x, std::vector<int>* y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  *x = FeatureMatrix(n, d);
  y->assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      (*x)(i, f) = normal(rng);
      s += (f + 1) * (*x)(i, f);
    }
    (*y)[i] = s + normal(rng) > 0.0 ? 1 : 0;
  }
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exhaustive search over every (feature, midpoint) pair of the given rows.
Split BruteForce(const FeatureMatrix& x, const std::vector<int>& y,
                 const std::vector<std::size_t>& rows, Criterion criterion,
                 std::size_t min_leaf) {
  auto impurity = [&](const std::vector<std::size_t>& r) {
    double n1 = 0;
    for (auto i : r) n1 += y[i];
    const double n0 = r.size() - n1;
    const double n = r.size();
    double p0 = n0 / n, p1 = n1 / n;
    if (criterion == Criterion::kGini) return 1 - p0 * p0 - p1 * p1;
    double h = 0;
    if (p0 > 0) h -= p0 * std::log(p0) / std::log(2.0);
    if (p1 > 0) h -= p1 * std::log(p1) / std::log(2.0);
    return h;
  };
  const double parent = impurity(rows);
  Split best;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> values;
    for (auto i : rows) values.insert(x(i, f));
    std::vector<double> sorted(values.begin(), values.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const double thr = (sorted[k] + sorted[k + 1]) / 2;
      std::vector<std::size_t> l, r;
      for (auto i : rows) (x(i, f) <= thr ? l : r).push_back(i);
      if (l.size() < min_leaf || r.size() < min_leaf) continue;
      const double n = rows.size();
      const double gain =
          parent - l.size() / n * impurity(l) - r.size() / n * impurity(r);
      if (!best.found || gain > best.gain + 1e-12) {
        best = {true, static_cast<int>(f), thr, gain};
      }
    }
  }
  return best;
}

void CollectRows(const Tree& tree, const FeatureMatrix& x, std::size_t node,
                 std::vector<std::vector<std::size_t>>& reach) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t at = 0;
    reach[at].push_back(i);
    while (!tree.nodes[at].IsLeaf()) {
      const auto& n = tree.nodes[at];
      at = x(i, n.feature) <= n.threshold ? n.left : n.right;
      reach[at].push_back(i);
    }
  }
  (void)node;
}

std::vector<std::vector<std::size_t>> RowsPerNode(const Tree& tree,
                                                  const FeatureMatrix& x) {
  std::vector<std::vector<std::size_t>> reach(tree.nodes.size());
  CollectRows(tree, x, 0, reach);
  return reach;
}

double LogLoss(const std::vector<double>& p, const std::vector<int>& y) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s -= y[i] ? std::log(p[i]) : std::log(1 - p[i]);
  }
  return s / p.size();
}

TEST(TreeTest, PureLabelsGiveSingleLeaf) {
  const auto x = Column({3, 1, 4, 1, 5});
  const std::vector<int> y(5, 1);
  const Tree tree = FitTree(x, y, TreeConfig{}, 0);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_TRUE(tree.nodes[0].IsLeaf());
  EXPECT_EQ(tree.nodes[0].n0, 0u);
  EXPECT_EQ(tree.nodes[0].n1, 5u);
  EXPECT_EQ(tree.nodes[0].value, 1.0);
}

TEST(TreeTest, FourPointSplitsAtOnePointFive) {
  const auto x = Column({0, 1, 2, 3});
  const std::vector<int> y = {0, 0, 1, 1};
  const Tree tree = FitTree(x, y, TreeConfig{}, 0);
  ASSERT_EQ(tree.nodes.size(), 3u);
  EXPECT_EQ(tree.nodes[0].feature, 0);
  EXPECT_EQ(tree.nodes[0].threshold, 1.5);
  const auto& l = tree.nodes[tree.nodes[0].left];
  const auto& r = tree.nodes[tree.nodes[0].right];
  EXPECT_EQ(l.n0, 2u);
  EXPECT_EQ(l.n1, 0u);
  EXPECT_EQ(r.n0, 0u);
  EXPECT_EQ(r.n1, 2u);
  // Oracle: gains at 0.5, 1.5, 2.5 are 1/6, 1/2, 1/6.
  const auto oracle = BruteForce(x, y, {0, 1, 2, 3}, Criterion::kGini, 1);
  EXPECT_EQ(oracle.threshold, 1.5);
  EXPECT_NEAR(oracle.gain, 0.5, 1e-15);
}

TEST(TreeTest, DepthOneHasAtMostThreeNodes) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(3, 200, 4, &x, &y);
  TreeConfig cfg;
  cfg.max_depth = 1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (auto splitter : {Splitter::kBest, Splitter::kRandom}) {
      cfg.splitter = splitter;
      EXPECT_LE(FitTree(x, y, cfg, seed).nodes.size(), 3u);
    }
  }
}

TEST(TreeTest, ConstantFeaturesGiveLeaf) {
  FeatureMatrix x(6, 2, 1.0);
  const std::vector<int> y = {0, 1, 0, 1, 1, 0};
  const Tree tree = FitTree(x, y, TreeConfig{}, 0);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_EQ(tree.nodes[0].value, 0.5);
}

TEST(TreeTest, BestSplitMatchesBruteForce) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    const std::size_t d = 1 + rng() % 4;
    FeatureMatrix x;
    std::vector<int> y;
    RandomProblem(rng, n, d, &x, &y);
    TreeConfig cfg;
    cfg.criterion = trial % 2 ? Criterion::kEntropy : Criterion::kGini;
    cfg.min_samples_leaf = 1 + trial % 3;
    const Tree tree = FitTree(x, y, cfg, trial);
    const auto reach = RowsPerNode(tree, x);
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      const auto& node = tree.nodes[k];
      if (node.IsLeaf()) continue;
      const auto oracle =
          BruteForce(x, y, reach[k], cfg.criterion, cfg.min_samples_leaf);
      ASSERT_TRUE(oracle.found);
      EXPECT_EQ(node.feature, oracle.feature) << "trial " << trial;
      EXPECT_EQ(node.threshold, oracle.threshold) << "trial " << trial;
      EXPECT_GE(oracle.gain, -1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(TreeTest, LeavesRespectMinimumCounts) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(5, 300, 3, &x, &y);
  for (std::size_t msl : {1u, 4u, 9u}) {
    for (std::size_t mss : {2u, 10u, 25u}) {
      for (auto splitter : {Splitter::kBest, Splitter::kRandom}) {
        TreeConfig cfg;
        cfg.min_samples_leaf = msl;
        cfg.min_samples_split = mss;
        cfg.splitter = splitter;
        const auto bag = BootstrapIndices(x.rows(), msl * mss);
        const Tree tree = FitTree(x, y, cfg, 11, bag);
        for (const auto& node : tree.nodes) {
          if (node.IsLeaf()) {
            EXPECT_GE(node.n0 + node.n1, msl);
          } else {
            EXPECT_GE(node.n0 + node.n1, mss);
          }
        }
        EXPECT_EQ(tree.nodes[0].n0 + tree.nodes[0].n1, x.rows());
      }
    }
  }
}

TEST(TreeTest, ImpurityNeverIncreasesDownASplit) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(8, 400, 4, &x, &y);
  for (auto criterion : {Criterion::kGini, Criterion::kEntropy}) {
    for (auto splitter : {Splitter::kBest, Splitter::kRandom}) {
      TreeConfig cfg;
      cfg.criterion = criterion;
      cfg.splitter = splitter;
      const Tree tree = FitTree(x, y, cfg, 1);
      for (const auto& node : tree.nodes) {
        if (node.IsLeaf()) continue;
        const auto& l = tree.nodes[node.left];
        const auto& r = tree.nodes[node.right];
        const double n = node.n0 + node.n1;
        const double children =
            (l.n0 + l.n1) / n * Impurity(l.n0, l.n1, criterion) +
            (r.n0 + r.n1) / n * Impurity(r.n0, r.n1, criterion);
        EXPECT_LE(children, Impurity(node.n0, node.n1, criterion) + 1e-12);
      }
    }
  }
}

TEST(TreeTest, RandomThresholdInsideNodeRange) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(9, 120, 3, &x, &y);
  TreeConfig cfg;
  cfg.splitter = Splitter::kRandom;
  const Tree tree = FitTree(x, y, cfg, 4);
  const auto reach = RowsPerNode(tree, x);
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const auto& node = tree.nodes[k];
    if (node.IsLeaf()) continue;
    double lo = 1e300, hi = -1e300;
    for (auto i : reach[k]) {
      lo = std::min(lo, x(i, node.feature));
      hi = std::max(hi, x(i, node.feature));
    }
    EXPECT_GE(node.threshold, lo);
    EXPECT_LT(node.threshold, hi);
  }
}

TEST(TreeTest, EntropyUsesBaseTwo) {
  EXPECT_DOUBLE_EQ(Impurity(5, 5, Criterion::kEntropy), 1.0);
  EXPECT_DOUBLE_EQ(Impurity(5, 5, Criterion::kGini), 0.5);
  EXPECT_EQ(Impurity(0, 3, Criterion::kEntropy), 0.0);
}

TEST(TreeTest, UnlimitedTreeMemorizesDistinctInputs) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(12, 250, 3, &x, &y);
  // Flip a few labels so memorization is needed.
  for (std::size_t i = 0; i < y.size(); i += 17) y[i] = 1 - y[i];
  const Tree tree = FitTree(x, y, TreeConfig{}, 0);
  const auto p = PredictProba(tree, x);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(p[i], y[i]);
}

TEST(TreeTest, PredictRejectsWrongWidth) {
  const Tree tree = FitTree(Column({0, 1, 2, 3}), std::vector<int>{0, 0, 1, 1},
                            TreeConfig{}, 0);
  EXPECT_EQ(ErrorKindOf([&] { PredictProba(tree, FeatureMatrix(2, 3)); }),
            ErrorKind::kArgument);
}

TEST(BootstrapTest, DrawsNWithReplacement) {
  const auto a = BootstrapIndices(1000, 5);
  ASSERT_EQ(a.size(), 1000u);
  for (auto i : a) EXPECT_LT(i, 1000u);
  EXPECT_EQ(a, BootstrapIndices(1000, 5));
  EXPECT_NE(a, BootstrapIndices(1000, 6));
  const std::set<std::size_t> unique(a.begin(), a.end());
  // Expected distinct fraction is 1 - 1/e.
  EXPECT_NEAR(unique.size() / 1000.0, 1 - std::exp(-1.0), 0.04);
}

TEST(ForestTest, DegenerateForestEqualsSingleTree) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(13, 150, 4, &x, &y);
  ForestConfig cfg;
  cfg.n_estimators = 1;
  cfg.bootstrap = false;
  cfg.splitter = Splitter::kBest;
  cfg.max_features = MaxFeatures::kAll;
  cfg.seed = 77;
  const auto forest = FitForest(x, y, cfg);
  ASSERT_EQ(forest.trees.size(), 1u);
  EXPECT_EQ(forest.trees[0], FitTree(x, y, cfg.Tree(), 77));
  EXPECT_EQ(PredictProba(forest, x), PredictProba(forest.trees[0], x));
}

TEST(ForestTest, ExtraTreesPresetLeavesHoldFour) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(14, 500, 7, &x, &y);
  ForestConfig cfg = ForestConfig::ExtraTrees();
  cfg.criterion = Criterion::kEntropy;
  cfg.min_samples_leaf = 4;
  cfg.n_estimators = 10;
  const auto forest = FitForest(x, y, cfg);
  ASSERT_EQ(forest.trees.size(), 10u);
  for (const auto& tree : forest.trees) {
    EXPECT_GT(tree.nodes.size(), 1u);
    for (const auto& node : tree.nodes) {
      if (node.IsLeaf()) EXPECT_GE(node.n0 + node.n1, 4u);
    }
  }
}

TEST(ForestTest, SameSeedSameForest) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(15, 300, 5, &x, &y);
  for (auto cfg : {ForestConfig::RandomForest(), ForestConfig::ExtraTrees()}) {
    cfg.n_estimators = 8;
    cfg.seed = 3;
    const auto a = FitForest(x, y, cfg);
    const auto b = FitForest(x, y, cfg);
    EXPECT_EQ(a.trees, b.trees);
    EXPECT_EQ(PredictProba(a, x), PredictProba(b, x));
    cfg.seed = 4;
    EXPECT_NE(FitForest(x, y, cfg).trees, a.trees);
  }
}

TEST(ForestTest, ProbabilityIsMeanOfTrees) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(16, 300, 4, &x, &y);
  ForestConfig cfg = ForestConfig::RandomForest();
  cfg.n_estimators = 10;
  cfg.max_depth = 4;
  const auto forest = FitForest(x, y, cfg);
  const auto p = PredictProba(forest, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double sum = 0;
    for (const auto& tree : forest.trees) {
      // Walk each tree by hand.
      std::size_t at = 0;
      while (!tree.nodes[at].IsLeaf()) {
        const auto& n = tree.nodes[at];
        at = x(i, n.feature) <= n.threshold ? n.left : n.right;
      }
      const auto& leaf = tree.nodes[at];
      sum += double(leaf.n1) / (leaf.n0 + leaf.n1);
    }
    EXPECT_NEAR(p[i], sum / 10, 1e-15);
    EXPECT_GE(p[i], 0.0);
    EXPECT_LE(p[i], 1.0);
  }
}

TEST(ForestTest, PureLeavesGiveHardProbabilities) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(17, 200, 3, &x, &y);
  ForestConfig cfg = ForestConfig::ExtraTrees();
  cfg.n_estimators = 1;
  const auto forest = FitForest(x, y, cfg);
  for (double p : PredictProba(forest, x)) EXPECT_TRUE(p == 0.0 || p == 1.0);
}

TEST(ForestTest, RejectsSingleClassAndBadConfig) {
  const auto x = Column({0, 1, 2});
  EXPECT_EQ(ErrorKindOf([&] {
              FitForest(x, std::vector<int>{1, 1, 1}, ForestConfig{});
            }),
            ErrorKind::kValidation);
  ForestConfig bad;
  bad.n_estimators = 0;
  EXPECT_EQ(ErrorKindOf([&] {
              FitForest(x, std::vector<int>{0, 1, 1}, bad);
            }),
            ErrorKind::kArgument);
  bad = ForestConfig{};
  bad.min_samples_split = 1;
  EXPECT_EQ(ErrorKindOf([&] {
              FitForest(x, std::vector<int>{0, 1, 1}, bad);
            }),
            ErrorKind::kArgument);
}

TEST(GbmTest, BaseScoreIsPriorLogOdds) {
  const auto x = Column({0, 1, 2, 3, 4});
  const std::vector<int> y = {0, 0, 0, 1, 1};
  GbmConfig cfg;
  cfg.iterations = 1;
  const auto model = FitGbm(x, y, cfg);
  EXPECT_DOUBLE_EQ(model.base_score, std::log(0.4 / 0.6));
  GbmModel prior = model;
  prior.trees.clear();
  for (double p : PredictProba(prior, x)) EXPECT_NEAR(p, 0.4, 1e-15);
}

TEST(GbmTest, OneStumpLowersLossOnFourPoints) {
  const auto x = Column({0, 1, 2, 3});
  const std::vector<int> y = {0, 0, 1, 1};
  GbmConfig cfg;
  cfg.iterations = 1;
  cfg.depth = 1;
  const auto model = FitGbm(x, y, cfg);
  ASSERT_EQ(model.trees.size(), 1u);
  const auto& tree = model.trees[0];
  ASSERT_EQ(tree.nodes.size(), 3u);
  EXPECT_EQ(tree.nodes[0].threshold, 1.5);
  // g = +-1/2, h = 1/4 per row: value = -(+-1) / (1/2 + 1).
  EXPECT_NEAR(tree.nodes[tree.nodes[0].left].value, -2.0 / 3, 1e-15);
  EXPECT_NEAR(tree.nodes[tree.nodes[0].right].value, 2.0 / 3, 1e-15);
  const double before = std::log(2.0);
  const double after = LogLoss(PredictProba(model, x), y);
  EXPECT_LT(after, before);
  const double f = 0.01 * 2.0 / 3;
  EXPECT_NEAR(after, std::log1p(std::exp(-f)), 1e-15);
}

TEST(GbmTest, HugeRegularisationStaysAtBaseRate) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(18, 200, 3, &x, &y);
  GbmConfig cfg;
  cfg.l2_leaf_reg = 1e12;
  cfg.iterations = 5;
  cfg.learning_rate = 0.3;
  const auto model = FitGbm(x, y, cfg);
  const double rate = std::count(y.begin(), y.end(), 1) / 200.0;
  for (double p : PredictProba(model, x)) EXPECT_NEAR(p, rate, 1e-9);
}

TEST(GbmTest, TrainingLossNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    FeatureMatrix x;
    std::vector<int> y;
    NoisyProblem(100 + seed, 150, 3, &x, &y);
    GbmConfig cfg;
    cfg.iterations = 30;
    cfg.depth = 1 + seed % 4;
    cfg.learning_rate = seed % 2 ? 0.1 : 0.03;
    cfg.l2_leaf_reg = seed % 3;
    const auto model = FitGbm(x, y, cfg);
    GbmModel partial = model;
    partial.trees.clear();
    double last = LogLoss(PredictProba(partial, x), y);
    for (const auto& tree : model.trees) {
      partial.trees.push_back(tree);
      const double loss = LogLoss(PredictProba(partial, x), y);
      EXPECT_LE(loss, last + 1e-15) << "seed " << seed;
      last = loss;
      for (const auto& node : tree.nodes) {
        EXPECT_TRUE(std::isfinite(node.value));
      }
    }
  }
}

TEST(GbmTest, ProbabilitiesStrictlyInsideUnitInterval) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(19, 200, 4, &x, &y);
  GbmConfig cfg;
  cfg.iterations = 50;
  cfg.learning_rate = 0.3;
  for (double p : PredictProba(FitGbm(x, y, cfg), x)) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(GbmTest, RejectsSingleClassAndBadConfig) {
  const auto x = Column({0, 1, 2});
  EXPECT_EQ(ErrorKindOf([&] {
              FitGbm(x, std::vector<int>{0, 0, 0}, GbmConfig{});
            }),
            ErrorKind::kValidation);
  GbmConfig bad;
  bad.learning_rate = 0;
  EXPECT_EQ(ErrorKindOf([&] { FitGbm(x, std::vector<int>{0, 1, 1}, bad); }),
            ErrorKind::kArgument);
  bad = GbmConfig{};
  bad.iterations = 0;
  EXPECT_EQ(ErrorKindOf([&] { FitGbm(x, std::vector<int>{0, 1, 1}, bad); }),
            ErrorKind::kArgument);
}

TEST(TreeIoTest, RoundTripsExactly) {
  FeatureMatrix x;
  std::vector<int> y;
  NoisyProblem(20, 300, 5, &x, &y);
  ForestConfig fc = ForestConfig::ExtraTrees();
  fc.n_estimators = 4;
  fc.criterion = Criterion::kEntropy;
  fc.seed = 123456789012345ull;
  const auto forest = FitForest(x, y, fc);
  const auto forest2 = ParseForest(FormatForest(forest));
  EXPECT_EQ(forest2.config, forest.config);
  EXPECT_EQ(forest2.trees, forest.trees);
  EXPECT_EQ(PredictProba(forest2, x), PredictProba(forest, x));

  GbmConfig gc;
  gc.iterations = 7;
  gc.learning_rate = 0.03;
  gc.l2_leaf_reg = 3;
  const auto gbm = FitGbm(x, y, gc);
  const auto gbm2 = ParseGbm(FormatGbm(gbm));
  EXPECT_EQ(gbm2.config, gbm.config);
  EXPECT_EQ(gbm2.base_score, gbm.base_score);
  EXPECT_EQ(gbm2.trees, gbm.trees);
  EXPECT_EQ(PredictProba(gbm2, x), PredictProba(gbm, x));

  const Tree& t = forest.trees[0];
  EXPECT_EQ(ParseTree(FormatTree(t)), t);
}

TEST(TreeIoTest, RejectsMalformedDumps) {
  const auto x = Column({0, 1, 2, 3});
  const Tree tree = FitTree(x, std::vector<int>{0, 0, 1, 1}, TreeConfig{}, 0);
  std::string text = FormatTree(tree);
  EXPECT_EQ(ErrorKindOf([&] { ParseTree(text.substr(0, text.size() - 12)); }),
            ErrorKind::kParse);
  std::string bad_feature = text;
  bad_feature.replace(bad_feature.find("split 0"), 7, "split 4");
  EXPECT_EQ(ErrorKindOf([&] { ParseTree(bad_feature); }), ErrorKind::kParse);
  EXPECT_EQ(ErrorKindOf([&] { ParseForest("foglab-forest 2"); }),
            ErrorKind::kParse);
  EXPECT_EQ(ErrorKindOf([&] { ParseTree(text + "leaf 1 1 0.5\n"); }),
            ErrorKind::kParse);
}

}  // namespace
}  // namespace foglab::trees
