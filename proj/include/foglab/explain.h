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

#ifndef FOGLAB_EXPLAIN_H_
#define FOGLAB_EXPLAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "foglab/matrix.h"

namespace foglab::explain {

// Model output (positive-class probability) for every row of a batch.
using BatchPredict = std::function<std::vector<double>(const FeatureMatrix&)>;

// 2^d coalitions are enumerated, so d is capped.
inline constexpr std::size_t kMaxExactFeatures = 20;

struct Attribution {
  std::vector<double> phi;
  double base_value = 0.0;   // mean output over the background
  double prediction = 0.0;   // output on the explained row
  std::vector<double> feature_values;
};

// Exact Shapley values with an interventional value function:
// v(S) = mean over background rows b of f(x on S, b elsewhere).
Attribution ShapleyExact(const BatchPredict& predict, std::span<const double> x,
                         const FeatureMatrix& background);

std::vector<Attribution> ExplainRows(const BatchPredict& predict,
                                     const FeatureMatrix& rows,
                                     const FeatureMatrix& background);

// Seeded subsample of at most `max_rows` rows, kept in original order.
FeatureMatrix SampleRows(const FeatureMatrix& x, std::size_t max_rows,
                         std::uint64_t seed);

struct BeeswarmPoint {
  std::size_t sample = 0;
  std::size_t feature = 0;
  std::size_t rank = 0;  // position of the feature in the ranking
  double shap = 0.0;
  double value = 0.0;
};

struct ShapSummary {
  std::vector<double> mean_abs;      // per feature index
  std::vector<std::size_t> ranking;  // feature indices, most important first
  std::vector<BeeswarmPoint> points;

  // feature_name,mean_abs_shap in ranking order.
  std::string BarCsv(std::span<const std::string> names) const;
  // sample_index,feature_name,feature_value,shap_value.
  std::string BeeswarmCsv(std::span<const std::string> names) const;
};

// Ranks by mean |phi| descending; equal means keep feature-index order.
ShapSummary Summarize(std::span<const Attribution> attributions);

}  // namespace foglab::explain

#endif  // FOGLAB_EXPLAIN_H_
