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

#ifndef FOGLAB_STACKING_H_
#define FOGLAB_STACKING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "foglab/data.h"
#include "foglab/matrix.h"
#include "foglab/trees.h"

namespace foglab::stacking {

struct LogisticConfig {
  double learning_rate = 0.1;
  std::size_t max_iters = 5000;
  double tol = 1e-6;
  double l2 = 1e-4;
  // Fit on z-scored columns and fold the scaling back into the returned
  // weights. Needed for raw sensor columns with very different ranges.
  bool standardize = false;

  void Validate() const;
  bool operator==(const LogisticConfig&) const = default;
};

struct LogisticModel {
  LogisticConfig config;
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;  // inf-norm at the last iterate
};

struct LogisticGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

// Mean log-loss plus l2 * ||w||^2 (the bias is not penalised).
double LogisticLoss(const LogisticModel& model, const FeatureMatrix& x,
                    std::span<const int> y, double l2);
LogisticGradient LogisticLossGradient(const LogisticModel& model,
                                      const FeatureMatrix& x,
                                      std::span<const int> y, double l2);

// Full-batch gradient descent from zero.
LogisticModel FitLogistic(const FeatureMatrix& x, std::span<const int> y,
                          const LogisticConfig& config);
std::vector<double> PredictProba(const LogisticModel& model,
                                 const FeatureMatrix& x);

using BaseConfig =
    std::variant<trees::ForestConfig, trees::GbmConfig, LogisticConfig>;
using BaseModel =
    std::variant<trees::ForestModel, trees::GbmModel, LogisticModel>;

BaseModel FitBase(const BaseConfig& config, const FeatureMatrix& x,
                  std::span<const int> y);
std::vector<double> PredictBase(const BaseModel& model, const FeatureMatrix& x);
std::size_t FeatureCount(const BaseModel& model);

struct NamedBase {
  std::string name;
  BaseConfig config;
};

struct StackConfig {
  std::vector<NamedBase> base;
  LogisticConfig meta;
  std::size_t cv_folds = 10;
  bool passthrough = false;
  std::uint64_t seed = 42;

  // Random forest, extra trees and two boosted-tree slots, each with 10
  // estimators of depth 3.
  static StackConfig Default();
  void Validate() const;
};

struct StackModel {
  std::vector<std::string> names;
  std::vector<BaseModel> base;
  LogisticModel meta;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 42;
  std::size_t n_features = 0;
};

// Optional bookkeeping from FitStack: the folds and the n x bases matrix of
// out-of-fold probabilities the meta-learner was trained on.
struct StackTrace {
  std::vector<data::Fold> folds;
  FeatureMatrix oof;
};

StackModel FitStack(const FeatureMatrix& x, std::span<const int> y,
                    const StackConfig& config, StackTrace* trace = nullptr);
// Base-learner probabilities, one column per base learner.
FeatureMatrix BaseProbabilities(const StackModel& model, const FeatureMatrix& x);
std::vector<double> PredictStack(const StackModel& model,
                                 const FeatureMatrix& x);

// Any of the centralized learners.
using LearnerConfig = std::variant<trees::ForestConfig, trees::GbmConfig,
                                   LogisticConfig, StackConfig>;
using LearnerModel = std::variant<trees::ForestModel, trees::GbmModel,
                                  LogisticModel, StackModel>;

LearnerModel FitLearner(const LearnerConfig& config, const FeatureMatrix& x,
                        std::span<const int> y);
std::vector<double> PredictLearner(const LearnerModel& model,
                                   const FeatureMatrix& x);
std::string_view LearnerKindName(const LearnerModel& model);

// Versioned text model files.
std::string FormatLogistic(const LogisticModel& model);
LogisticModel ParseLogistic(std::string_view text);
std::string FormatStack(const StackModel& model);
StackModel ParseStack(std::string_view text);
std::string FormatLearner(const LearnerModel& model);
LearnerModel ParseLearner(std::string_view text);
void SaveLearner(const std::filesystem::path& path, const LearnerModel& model);
LearnerModel LoadLearner(const std::filesystem::path& path);

}  // namespace foglab::stacking

#endif  // FOGLAB_STACKING_H_
