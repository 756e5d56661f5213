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

#include "foglab/stacking.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "foglab/data.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace foglab::stacking {
namespace {

using ::foglab::testing::ErrorKindOf;

double Accuracy(const std::vector<double>& p, const std::vector<int>& y) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hit += (p[i] > 0.5) == (y[i] == 1);
  return double(hit) / p.size();
}

struct Split {
  FeatureMatrix x_train, x_test;
  std::vector<int> y_train, y_test;
};

Split SyntheticSplit(double separation, std::uint64_t seed) {
  data::SyntheticConfig cfg;
  cfg.separation = separation;
  cfg.seed = seed;
  const auto ds = data::GenerateSynthetic(cfg);
  const auto [train, test] = data::TrainTestSplit(ds, data::SplitSpec{});
  return {train.ToFeatureMatrix(), test.ToFeatureMatrix(), train.Labels(),
          test.Labels()};
}

StackConfig SmallStack() {
  StackConfig c = StackConfig::Default();
  c.cv_folds = 5;
  return c;
}

TEST(LogisticTest, SeparableOneDimensional) {
  FeatureMatrix x(8, 1, std::vector<double>{-4, -3, -2, -1, 1, 2, 3, 4});
  const std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
  LogisticConfig cfg;
  cfg.l2 = 1e-4;
  const auto model = FitLogistic(x, y, cfg);
  EXPECT_EQ(Accuracy(PredictProba(model, x), y), 1.0);
  EXPECT_GT(model.weights[0], 0.0);
}

TEST(LogisticTest, IndependentLabelsShrinkToBaseRate) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMatrix x(400, 3);
  std::vector<int> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = normal(rng);
    y[i] = i % 10 < 3 ? 1 : 0;
  }
  std::shuffle(y.begin(), y.end(), rng);
  LogisticConfig cfg;
  cfg.l2 = 1.0;
  const auto model = FitLogistic(x, y, cfg);
  for (double w : model.weights) EXPECT_LT(std::abs(w), 0.1);
  for (double p : PredictProba(model, x)) EXPECT_NEAR(p, 0.3, 0.05);
}

TEST(LogisticTest, GradientAtZeroMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMatrix x(50, 4);
  std::vector<int> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 4; ++j) x(i, j) = normal(rng);
    y[i] = static_cast<int>(rng() % 2);
  }
  LogisticModel zero;
  zero.weights.assign(4, 0.0);
  const double l2 = 0.01;
  const auto g = LogisticLossGradient(zero, x, y, l2);
  for (std::size_t j = 0; j < 4; ++j) {
    double expected = 0.0;
    for (std::size_t i = 0; i < 50; ++i) expected += (0.5 - y[i]) * x(i, j);
    EXPECT_NEAR(g.weights[j], expected / 50, 1e-15);
    const double h = 1e-5;
    LogisticModel plus = zero, minus = zero;
    plus.weights[j] += h;
    minus.weights[j] -= h;
    const double fd =
        (LogisticLoss(plus, x, y, l2) - LogisticLoss(minus, x, y, l2)) / (2 * h);
    EXPECT_NEAR(g.weights[j], fd, 1e-6);
  }
  LogisticModel plus = zero, minus = zero;
  plus.bias += 1e-5;
  minus.bias -= 1e-5;
  const double fd =
      (LogisticLoss(plus, x, y, l2) - LogisticLoss(minus, x, y, l2)) / 2e-5;
  EXPECT_NEAR(g.bias, fd, 1e-6);
}

TEST(LogisticTest, StandardizedFitIgnoresAffineRescaling) {
  const auto s = SyntheticSplit(1.0, 3);
  LogisticConfig cfg;
  cfg.standardize = true;
  cfg.max_iters = 500;
  const auto a = FitLogistic(s.x_train, s.y_train, cfg);
  FeatureMatrix scaled = s.x_train;
  FeatureMatrix scaled_test = s.x_test;
  for (auto* m : {&scaled, &scaled_test}) {
    for (std::size_t i = 0; i < m->rows(); ++i) {
      for (std::size_t j = 0; j < m->cols(); ++j) {
        (*m)(i, j) = 250.0 * (*m)(i, j) - 40.0;
      }
    }
  }
  const auto b = FitLogistic(scaled, s.y_train, cfg);
  const auto pa = PredictProba(a, s.x_test);
  const auto pb = PredictProba(b, scaled_test);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-9);
}

TEST(LogisticTest, LinearClassifierOnGeneratorOutput) {
  const auto s = SyntheticSplit(1.0, 7);
  LogisticConfig cfg;
  cfg.standardize = true;
  const auto model = FitLogistic(s.x_train, s.y_train, cfg);
  EXPECT_GT(Accuracy(PredictProba(model, s.x_test), s.y_test), 0.8);
}

TEST(LogisticTest, RejectsSingleClassAndBadWidth) {
  FeatureMatrix x(3, 1, std::vector<double>{1, 2, 3});
  EXPECT_EQ(ErrorKindOf([&] {
              FitLogistic(x, std::vector<int>{0, 0, 0}, LogisticConfig{});
            }),
            ErrorKind::kValidation);
  const auto model =
      FitLogistic(x, std::vector<int>{0, 0, 1}, LogisticConfig{});
  EXPECT_EQ(ErrorKindOf([&] { PredictProba(model, FeatureMatrix(1, 2)); }),
            ErrorKind::kArgument);
}

TEST(StackTest, SeparableSyntheticIsPerfect) {
  const auto s = SyntheticSplit(6.0, 42);
  const auto model = FitStack(s.x_train, s.y_train, StackConfig::Default());
  EXPECT_EQ(Accuracy(PredictStack(model, s.x_test), s.y_test), 1.0);
}

TEST(StackTest, OutOfFoldBookkeeping) {
  const auto s = SyntheticSplit(1.0, 5);
  StackConfig cfg = SmallStack();
  StackTrace trace;
  FitStack(s.x_train, s.y_train, cfg, &trace);
  const std::size_t n = s.x_train.rows();
  ASSERT_EQ(trace.folds.size(), cfg.cv_folds);
  ASSERT_EQ(trace.oof.rows(), n);
  ASSERT_EQ(trace.oof.cols(), 4u);
  std::vector<int> seen(n, 0);
  for (const auto& fold : trace.folds) {
    std::vector<std::size_t> both;
    std::set_intersection(fold.train.begin(), fold.train.end(),
                          fold.test.begin(), fold.test.end(),
                          std::back_inserter(both));
    EXPECT_TRUE(both.empty());
    EXPECT_EQ(fold.train.size() + fold.test.size(), n);
    for (auto i : fold.test) ++seen[i];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
  for (double v : trace.oof.values()) EXPECT_TRUE(std::isfinite(v));
  // Each OOF entry is reproduced by a model fit only on the other folds.
  for (std::size_t b = 0; b < cfg.base.size(); ++b) {
    for (const auto& fold : trace.folds) {
      const auto labels = SelectItems<int>(s.y_train, fold.train);
      const auto model = FitBase(cfg.base[b].config,
                                 s.x_train.SelectRows(fold.train), labels);
      const auto p = PredictBase(model, s.x_train.SelectRows(fold.test));
      for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_EQ(trace.oof(fold.test[i], b), p[i]);
      }
    }
  }
}

TEST(StackTest, IdenticalBasesGiveIdenticalColumns) {
  const auto s = SyntheticSplit(2.0, 6);
  StackConfig cfg = SmallStack();
  trees::ForestConfig rf = trees::ForestConfig::RandomForest();
  rf.n_estimators = 5;
  rf.max_depth = 4;
  rf.seed = 9;
  cfg.base = {{"a", rf}, {"b", rf}, {"c", rf}, {"d", rf}};
  StackTrace trace;
  const auto model = FitStack(s.x_train, s.y_train, cfg, &trace);
  for (std::size_t i = 0; i < trace.oof.rows(); ++i) {
    for (std::size_t b = 1; b < 4; ++b) {
      EXPECT_EQ(trace.oof(i, b), trace.oof(i, 0));
    }
  }
  for (std::size_t b = 1; b < 4; ++b) {
    EXPECT_EQ(model.meta.weights[b], model.meta.weights[0]);
  }
  EXPECT_GT(model.meta.weights[0], 0.0);
  // The stack is an increasing function of the shared base probability.
  const auto base = trees::PredictProba(trees::FitForest(s.x_train, s.y_train, rf),
                                        s.x_test);
  const auto stack = PredictStack(model, s.x_test);
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = 0; j < base.size(); j += 97) {
      if (base[i] < base[j]) EXPECT_LT(stack[i], stack[j]);
      if (base[i] == base[j]) EXPECT_EQ(stack[i], stack[j]);
    }
  }
}

TEST(StackTest, ZeroMetaWeightsGiveOneHalf) {
  const auto s = SyntheticSplit(1.0, 8);
  auto model = FitStack(s.x_train, s.y_train, SmallStack());
  std::fill(model.meta.weights.begin(), model.meta.weights.end(), 0.0);
  model.meta.bias = 0.0;
  for (double p : PredictStack(model, s.x_test)) EXPECT_EQ(p, 0.5);
}

TEST(StackTest, DroppingZeroWeightBaseLeavesPredictions) {
  const auto s = SyntheticSplit(1.0, 10);
  auto model = FitStack(s.x_train, s.y_train, SmallStack());
  model.meta.weights[2] = 0.0;
  const auto full = PredictStack(model, s.x_test);
  StackModel ablated = model;
  ablated.base.erase(ablated.base.begin() + 2);
  ablated.names.erase(ablated.names.begin() + 2);
  ablated.meta.weights.erase(ablated.meta.weights.begin() + 2);
  EXPECT_EQ(PredictStack(ablated, s.x_test), full);
}

TEST(StackTest, NotWorseThanBestBaseByTwoPoints) {
  const auto s = SyntheticSplit(1.0, 7);
  const StackConfig cfg = StackConfig::Default();
  const auto model = FitStack(s.x_train, s.y_train, cfg);
  const double stack = Accuracy(PredictStack(model, s.x_test), s.y_test);
  double best = 0.0;
  for (const auto& b : cfg.base) {
    const auto m = FitBase(b.config, s.x_train, s.y_train);
    best = std::max(best, Accuracy(PredictBase(m, s.x_test), s.y_test));
  }
  EXPECT_GE(stack, best - 0.02) << "stack " << stack << " best " << best;
}

TEST(StackTest, Reproducible) {
  const auto s = SyntheticSplit(1.0, 11);
  const auto a = FitStack(s.x_train, s.y_train, SmallStack());
  const auto b = FitStack(s.x_train, s.y_train, SmallStack());
  EXPECT_EQ(FormatStack(a), FormatStack(b));
  EXPECT_EQ(PredictStack(a, s.x_test), PredictStack(b, s.x_test));
}

TEST(StackTest, ConfigAndInputErrors) {
  const auto s = SyntheticSplit(1.0, 12);
  StackConfig cfg = SmallStack();
  cfg.passthrough = true;
  EXPECT_EQ(ErrorKindOf([&] { FitStack(s.x_train, s.y_train, cfg); }),
            ErrorKind::kUnsupported);
  cfg = SmallStack();
  cfg.cv_folds = 1;
  EXPECT_EQ(ErrorKindOf([&] { FitStack(s.x_train, s.y_train, cfg); }),
            ErrorKind::kArgument);
  cfg = SmallStack();
  cfg.base.clear();
  EXPECT_EQ(ErrorKindOf([&] { FitStack(s.x_train, s.y_train, cfg); }),
            ErrorKind::kArgument);
  // A lone positive lands in one test fold, so that fold trains on
  // negatives only.
  FeatureMatrix x(6, 1, std::vector<double>{0, 1, 2, 3, 4, 5});
  cfg = SmallStack();
  cfg.cv_folds = 2;
  EXPECT_EQ(ErrorKindOf([&] {
              FitStack(x, std::vector<int>{0, 0, 0, 0, 0, 1}, cfg);
            }),
            ErrorKind::kValidation);
  const auto model = FitStack(s.x_train, s.y_train, SmallStack());
  EXPECT_EQ(ErrorKindOf([&] { PredictStack(model, FeatureMatrix(2, 3)); }),
            ErrorKind::kArgument);
}

TEST(LearnerIoTest, RoundTripsEveryKind) {
  const auto s = SyntheticSplit(1.0, 13);
  LogisticConfig lc;
  lc.standardize = true;
  lc.max_iters = 300;
  trees::GbmConfig gc;
  gc.iterations = 5;
  const std::vector<LearnerConfig> configs = {
      trees::ForestConfig::RandomForest(), gc, lc, SmallStack()};
  for (const auto& cfg : configs) {
    const LearnerModel model = FitLearner(cfg, s.x_train, s.y_train);
    const std::string text = FormatLearner(model);
    const LearnerModel back = ParseLearner(text);
    EXPECT_EQ(back.index(), model.index());
    EXPECT_EQ(FormatLearner(back), text);
    EXPECT_EQ(PredictLearner(back, s.x_test), PredictLearner(model, s.x_test))
        << LearnerKindName(model);
  }
  EXPECT_EQ(ErrorKindOf([] { ParseLearner("foglab-unknown 1"); }),
            ErrorKind::kParse);
  EXPECT_EQ(ErrorKindOf([] { ParseLearner(""); }), ErrorKind::kParse);
}

}  // namespace
}  // namespace foglab::stacking
