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
#include <type_traits>
#include <variant>

#include <Eigen/Dense>

#include "foglab/error.h"

namespace foglab::stacking {

namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckTraining(const FeatureMatrix& x, std::span<const int> y,
                   const char* what) {
  if (x.rows() == 0 || x.cols() == 0) {
    Fail(ErrorKind::kArgument, std::string(what) + ": empty training matrix");
  }
  if (y.size() != x.rows()) {
    Fail(ErrorKind::kArgument,
         std::string(what) + ": label count does not match row count");
  }
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) {
      Fail(ErrorKind::kArgument, std::string(what) + ": labels must be 0 or 1");
    }
    pos += v;
  }
  if (pos == 0 || pos == y.size()) {
    Fail(ErrorKind::kValidation,
         std::string(what) + " needs both classes in the training labels");
  }
}

void CheckWidth(std::size_t expected, const FeatureMatrix& x) {
  if (x.cols() != expected) {
    Fail(ErrorKind::kArgument, "model expects " + std::to_string(expected) +
                                   " features, got " +
                                   std::to_string(x.cols()));
  }
}

double Logit(const LogisticModel& model, std::span<const double> row) {
  double z = model.bias;
  for (std::size_t j = 0; j < row.size(); ++j) z += model.weights[j] * row[j];
  return z;
}

double InfNorm(const LogisticGradient& g) {
  double m = std::abs(g.bias);
  for (double v : g.weights) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

void LogisticConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorKind::kArgument, "logistic learning_rate must be > 0");
  }
  if (!(tol >= 0.0)) Fail(ErrorKind::kArgument, "logistic tol must be >= 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    Fail(ErrorKind::kArgument, "logistic l2 must be >= 0");
  }
}

double LogisticLoss(const LogisticModel& model, const FeatureMatrix& x,
                    std::span<const int> y, double l2) {
  CheckWidth(model.weights.size(), x);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = Logit(model, x.Row(i));
    // log(1 + e^z) - y z, computed without overflow.
    const double softplus =
        z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - y[i] * z;
  }
  loss /= static_cast<double>(x.rows());
  for (double w : model.weights) loss += l2 * w * w;
  return loss;
}

LogisticGradient LogisticLossGradient(const LogisticModel& model,
                                      const FeatureMatrix& x,
                                      std::span<const int> y, double l2) {
  CheckWidth(model.weights.size(), x);
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> m(x.values().data(), x.rows(), x.cols());
  const Eigen::Map<const Eigen::VectorXd> w(model.weights.data(),
                                            model.weights.size());
  Eigen::VectorXd r = (m * w).array() + model.bias;
  for (std::size_t i = 0; i < x.rows(); ++i) r[i] = Sigmoid(r[i]) - y[i];
  const double n = static_cast<double>(x.rows());
  const Eigen::VectorXd gw = m.transpose() * r / n + 2.0 * l2 * w;
  LogisticGradient g;
  g.weights.assign(gw.data(), gw.data() + gw.size());
  g.bias = r.sum() / n;
  return g;
}

LogisticModel FitLogistic(const FeatureMatrix& x, std::span<const int> y,
                          const LogisticConfig& config) {
  config.Validate();
  CheckTraining(x, y, "logistic regression");
  const std::size_t d = x.cols();

  std::vector<double> mean(d, 0.0), scale(d, 1.0);
  FeatureMatrix z = x;
  if (config.standardize) {
    const double n = static_cast<double>(x.rows());
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, j);
      mean[j] = s / n;
      double ss = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) {
        ss += (x(i, j) - mean[j]) * (x(i, j) - mean[j]);
      }
      const double sd = std::sqrt(ss / n);
      scale[j] = sd > 0.0 ? sd : 1.0;
      for (std::size_t i = 0; i < x.rows(); ++i) {
        z(i, j) = (x(i, j) - mean[j]) / scale[j];
      }
    }
  }

  LogisticModel model;
  model.config = config;
  model.weights.assign(d, 0.0);
  double norm = std::numeric_limits<double>::infinity();
  while (true) {
    const LogisticGradient g = LogisticLossGradient(model, z, y, config.l2);
    norm = InfNorm(g);
    if (norm < config.tol || model.iterations >= config.max_iters) break;
    for (std::size_t j = 0; j < d; ++j) {
      model.weights[j] -= config.learning_rate * g.weights[j];
    }
    model.bias -= config.learning_rate * g.bias;
    ++model.iterations;
  }
  model.gradient_norm = norm;
  if (config.standardize) {
    for (std::size_t j = 0; j < d; ++j) {
      model.weights[j] /= scale[j];
      model.bias -= model.weights[j] * mean[j];
    }
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) Fail(ErrorKind::kNumeric, "logistic weights diverged");
  }
  if (!std::isfinite(model.bias)) {
    Fail(ErrorKind::kNumeric, "logistic bias diverged");
  }
  return model;
}

std::vector<double> PredictProba(const LogisticModel& model,
                                 const FeatureMatrix& x) {
  CheckWidth(model.weights.size(), x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out[i] = Sigmoid(Logit(model, x.Row(i)));
  }
  return out;
}

BaseModel FitBase(const BaseConfig& config, const FeatureMatrix& x,
                  std::span<const int> y) {
  return std::visit(
      [&](const auto& c) -> BaseModel {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, trees::ForestConfig>) {
          return trees::FitForest(x, y, c);
        } else if constexpr (std::is_same_v<T, trees::GbmConfig>) {
          return trees::FitGbm(x, y, c);
        } else {
          return FitLogistic(x, y, c);
        }
      },
      config);
}

std::vector<double> PredictBase(const BaseModel& model,
                                const FeatureMatrix& x) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          return PredictProba(m, x);
        } else {
          return trees::PredictProba(m, x);
        }
      },
      model);
}

std::size_t FeatureCount(const BaseModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          return m.weights.size();
        } else {
          return m.n_features;
        }
      },
      model);
}

StackConfig StackConfig::Default() {
  StackConfig c;
  trees::ForestConfig rf = trees::ForestConfig::RandomForest();
  rf.n_estimators = 10;
  rf.max_depth = 3;
  rf.seed = 42;
  trees::ForestConfig et = trees::ForestConfig::ExtraTrees();
  et.n_estimators = 10;
  et.max_depth = 3;
  et.seed = 42;
  // Library defaults of the two boosting packages for the settings the
  // configuration leaves open: step 0.3 / l2 1 and step 0.03 / l2 3.
  trees::GbmConfig xgb;
  xgb.iterations = 10;
  xgb.depth = 3;
  xgb.learning_rate = 0.3;
  xgb.l2_leaf_reg = 1.0;
  xgb.seed = 42;
  trees::GbmConfig cat;
  cat.iterations = 10;
  cat.depth = 3;
  cat.learning_rate = 0.03;
  cat.l2_leaf_reg = 3.0;
  cat.seed = 42;
  c.base = {{"random_forest", rf},
            {"extra_trees", et},
            {"xgboost", xgb},
            {"catboost", cat}};
  return c;
}

void StackConfig::Validate() const {
  if (base.empty()) Fail(ErrorKind::kArgument, "stack needs base learners");
  if (cv_folds < 2) Fail(ErrorKind::kArgument, "stack cv_folds must be >= 2");
  if (passthrough) {
    Fail(ErrorKind::kUnsupported, "stack passthrough=true is not supported");
  }
  meta.Validate();
  for (const auto& b : base) {
    std::visit([](const auto& c) { c.Validate(); }, b.config);
  }
}

StackModel FitStack(const FeatureMatrix& x, std::span<const int> y,
                    const StackConfig& config, StackTrace* trace) {
  config.Validate();
  CheckTraining(x, y, "stack");
  const std::size_t n = x.rows();
  if (n < config.cv_folds) {
    Fail(ErrorKind::kArgument, "stack needs at least cv_folds rows");
  }
  const auto folds = data::KFoldIndices(n, config.cv_folds, y, config.seed);
  std::vector<std::vector<int>> fold_labels;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<int> labels = SelectItems<int>(y, folds[f].train);
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    if (pos == 0 || pos == static_cast<long>(labels.size())) {
      Fail(ErrorKind::kValidation,
           "cannot stratify: training part of fold " + std::to_string(f) +
               " holds a single class");
    }
    fold_labels.push_back(std::move(labels));
  }

  const std::size_t m = config.base.size();
  FeatureMatrix oof(n, m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const BaseModel model = FitBase(config.base[b].config,
                                      x.SelectRows(folds[f].train),
                                      fold_labels[f]);
      const auto p = PredictBase(model, x.SelectRows(folds[f].test));
      for (std::size_t i = 0; i < p.size(); ++i) oof(folds[f].test[i], b) = p[i];
    }
  }

  StackModel model;
  model.cv_folds = config.cv_folds;
  model.seed = config.seed;
  model.n_features = x.cols();
  model.meta = FitLogistic(oof, y, config.meta);
  for (const auto& b : config.base) {
    model.names.push_back(b.name);
    model.base.push_back(FitBase(b.config, x, y));
  }
  if (trace) {
    trace->folds = folds;
    trace->oof = std::move(oof);
  }
  return model;
}

FeatureMatrix BaseProbabilities(const StackModel& model,
                                const FeatureMatrix& x) {
  CheckWidth(model.n_features, x);
  FeatureMatrix out(x.rows(), model.base.size());
  for (std::size_t b = 0; b < model.base.size(); ++b) {
    const auto p = PredictBase(model.base[b], x);
    for (std::size_t i = 0; i < p.size(); ++i) out(i, b) = p[i];
  }
  return out;
}

std::vector<double> PredictStack(const StackModel& model,
                                 const FeatureMatrix& x) {
  return PredictProba(model.meta, BaseProbabilities(model, x));
}

LearnerModel FitLearner(const LearnerConfig& config, const FeatureMatrix& x,
                        std::span<const int> y) {
  return std::visit(
      [&](const auto& c) -> LearnerModel {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, trees::ForestConfig>) {
          return trees::FitForest(x, y, c);
        } else if constexpr (std::is_same_v<T, trees::GbmConfig>) {
          return trees::FitGbm(x, y, c);
        } else if constexpr (std::is_same_v<T, LogisticConfig>) {
          return FitLogistic(x, y, c);
        } else {
          return FitStack(x, y, c);
        }
      },
      config);
}

std::vector<double> PredictLearner(const LearnerModel& model,
                                   const FeatureMatrix& x) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StackModel>) {
          return PredictStack(m, x);
        } else if constexpr (std::is_same_v<T, LogisticModel>) {
          return PredictProba(m, x);
        } else {
          return trees::PredictProba(m, x);
        }
      },
      model);
}

std::string_view LearnerKindName(const LearnerModel& model) {
  switch (model.index()) {
    case 0:
      return "forest";
    case 1:
      return "gbm";
    case 2:
      return "logistic";
    default:
      return "stack";
  }
}

}  // namespace foglab::stacking
