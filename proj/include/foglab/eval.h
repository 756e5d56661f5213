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

#ifndef FOGLAB_EVAL_H_
#define FOGLAB_EVAL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foglab/matrix.h"

namespace foglab::eval {

// Positive class is 1 (freezing event).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t Total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix Confusion(std::span<const int> pred, std::span<const int> truth);

// p > 0.5 -> 1; an exact 0.5 goes to class 0.
std::vector<int> HardLabels(std::span<const double> probs);

double Accuracy(const ConfusionMatrix& cm);
double ErrorRate(const ConfusionMatrix& cm);
// A zero denominator yields 0 and sets *zero_division when given.
double Precision(const ConfusionMatrix& cm, bool* zero_division = nullptr);
double Recall(const ConfusionMatrix& cm, bool* zero_division = nullptr);
double F1(const ConfusionMatrix& cm, bool* zero_division = nullptr);

// Mann-Whitney statistic: probability that a random positive scores above a
// random negative, ties counted as one half.
double RocAuc(std::span<const double> scores, std::span<const int> truth);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  ConfusionMatrix cm;
  std::array<ClassMetrics, 2> per_class;  // index = class label
  double accuracy = 0.0;
  ClassMetrics macro;
  ClassMetrics weighted;
  std::optional<double> auc;
  // One entry per metric that hit a zero denominator.
  std::vector<std::string> warnings;

  // Aligned table rounded to two decimals.
  std::string ToText() const;
  // "key = value" lines at full precision.
  std::string ToKeyValue() const;
};

MetricsReport ClassificationReport(
    std::span<const int> pred, std::span<const int> truth,
    std::optional<std::span<const double>> scores = std::nullopt);

// Two-row grid: rows are true class 0/1, columns predicted class 0/1.
std::string FormatConfusion(const ConfusionMatrix& cm);

struct FoldAggregate {
  double mean = 0.0;
  double std = 0.0;  // population (divisor N)
};

FoldAggregate AggregateFolds(std::span<const double> values);

// Trains grid point `grid_index` on the training rows and returns
// positive-class probabilities for the test rows.
using FitPredict = std::function<std::vector<double>(
    std::size_t grid_index, const FeatureMatrix& x_train,
    std::span<const int> y_train, const FeatureMatrix& x_test)>;

struct NestedCvConfig {
  std::size_t outer_k = 10;
  std::size_t inner_k = 3;
  std::uint64_t seed = 42;
};

struct NestedCvFold {
  std::size_t chosen = 0;
  std::vector<double> inner_accuracy;  // mean inner accuracy per grid point
  double accuracy = 0.0;
  std::size_t test_size = 0;
};

struct NestedCvResult {
  std::vector<NestedCvFold> folds;
  double mean = 0.0;
  double std = 0.0;

  std::vector<double> Accuracies() const;
  // "fold,accuracy,chosen" rows followed by mean and std rows.
  std::string ToCsv() const;
};

// Outer stratified folds score the grid point that wins an inner stratified
// cross-validation on the outer training part (ties go to the earlier grid
// point).
NestedCvResult NestedCv(const FitPredict& fit_predict, std::size_t grid_size,
                        const FeatureMatrix& x, std::span<const int> y,
                        const NestedCvConfig& config);

}  // namespace foglab::eval

#endif  // FOGLAB_EVAL_H_
