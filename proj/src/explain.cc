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

#include "foglab/explain.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "foglab/error.h"
#include "foglab/text_io.h"

namespace foglab::explain {

namespace {

// Rows per model call; coalitions are batched up to this size.
constexpr std::size_t kBatchRows = 1 << 16;

// |S|! (d - |S| - 1)! / d! = 1 / (d * C(d - 1, |S|)).
std::vector<double> CoalitionWeights(std::size_t d) {
  std::vector<double> w(d);
  double binom = 1.0;
  for (std::size_t s = 0; s < d; ++s) {
    w[s] = 1.0 / (static_cast<double>(d) * binom);
    binom = binom * static_cast<double>(d - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

}  // namespace

Attribution ShapleyExact(const BatchPredict& predict, std::span<const double> x,
                         const FeatureMatrix& background) {
  const std::size_t d = x.size();
  const std::size_t m = background.rows();
  if (m == 0) Fail(ErrorKind::kArgument, "Shapley background is empty");
  if (d == 0) Fail(ErrorKind::kArgument, "Shapley needs at least one feature");
  if (background.cols() != d) {
    Fail(ErrorKind::kArgument, "background width differs from the sample");
  }
  if (d > kMaxExactFeatures) {
    Fail(ErrorKind::kUnsupported,
         "exact Shapley enumeration is limited to " +
             std::to_string(kMaxExactFeatures) +
             " features; use sampling for wider inputs");
  }

  const std::size_t coalitions = std::size_t{1} << d;
  std::vector<double> value(coalitions);
  const std::size_t per_batch = std::max<std::size_t>(1, kBatchRows / m);
  for (std::size_t first = 0; first < coalitions; first += per_batch) {
    const std::size_t last = std::min(coalitions, first + per_batch);
    FeatureMatrix batch((last - first) * m, d);
    for (std::size_t mask = first; mask < last; ++mask) {
      for (std::size_t b = 0; b < m; ++b) {
        auto row = batch.MutableRow((mask - first) * m + b);
        const auto base = background.Row(b);
        for (std::size_t j = 0; j < d; ++j) {
          row[j] = (mask >> j) & 1 ? x[j] : base[j];
        }
      }
    }
    const auto out = predict(batch);
    if (out.size() != batch.rows()) {
      Fail(ErrorKind::kRuntime, "predictor returned the wrong number of rows");
    }
    for (std::size_t mask = first; mask < last; ++mask) {
      double sum = 0.0;
      for (std::size_t b = 0; b < m; ++b) sum += out[(mask - first) * m + b];
      value[mask] = sum / static_cast<double>(m);
    }
  }

  const auto weight = CoalitionWeights(d);
  Attribution a;
  a.phi.assign(d, 0.0);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t i = 0; i < d; ++i) {
      if ((mask >> i) & 1) continue;
      a.phi[i] += weight[size] * (value[mask | (std::size_t{1} << i)] - value[mask]);
    }
  }
  a.base_value = value[0];
  FeatureMatrix single(1, d, std::vector<double>(x.begin(), x.end()));
  a.prediction = predict(single).at(0);
  a.feature_values.assign(x.begin(), x.end());
  return a;
}

std::vector<Attribution> ExplainRows(const BatchPredict& predict,
                                     const FeatureMatrix& rows,
                                     const FeatureMatrix& background) {
  std::vector<Attribution> out;
  out.reserve(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    out.push_back(ShapleyExact(predict, rows.Row(i), background));
  }
  return out;
}

FeatureMatrix SampleRows(const FeatureMatrix& x, std::size_t max_rows,
                         std::uint64_t seed) {
  std::vector<std::size_t> idx(x.rows());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() > max_rows) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(max_rows);
    std::sort(idx.begin(), idx.end());
  }
  return x.SelectRows(idx);
}

ShapSummary Summarize(std::span<const Attribution> attributions) {
  if (attributions.empty()) {
    Fail(ErrorKind::kArgument, "nothing to summarize");
  }
  const std::size_t d = attributions.front().phi.size();
  ShapSummary s;
  s.mean_abs.assign(d, 0.0);
  for (const auto& a : attributions) {
    if (a.phi.size() != d || a.feature_values.size() != d) {
      Fail(ErrorKind::kArgument, "attributions have different widths");
    }
    for (std::size_t j = 0; j < d; ++j) s.mean_abs[j] += std::abs(a.phi[j]);
  }
  for (double& v : s.mean_abs) v /= static_cast<double>(attributions.size());
  s.ranking.resize(d);
  std::iota(s.ranking.begin(), s.ranking.end(), 0);
  std::stable_sort(s.ranking.begin(), s.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return s.mean_abs[a] > s.mean_abs[b];
                   });
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t j = s.ranking[r];
    for (std::size_t i = 0; i < attributions.size(); ++i) {
      s.points.push_back(
          {i, j, r, attributions[i].phi[j], attributions[i].feature_values[j]});
    }
  }
  return s;
}

std::string ShapSummary::BarCsv(std::span<const std::string> names) const {
  if (names.size() != mean_abs.size()) {
    Fail(ErrorKind::kArgument, "feature name count differs from the summary");
  }
  std::ostringstream out;
  out << "feature_name,mean_abs_shap\n";
  for (std::size_t j : ranking) {
    out << names[j] << "," << FormatDouble(mean_abs[j]) << "\n";
  }
  return out.str();
}

std::string ShapSummary::BeeswarmCsv(std::span<const std::string> names) const {
  if (names.size() != mean_abs.size()) {
    Fail(ErrorKind::kArgument, "feature name count differs from the summary");
  }
  std::ostringstream out;
  out << "sample_index,feature_name,feature_value,shap_value\n";
  for (const auto& p : points) {
    out << p.sample << "," << names[p.feature] << "," << FormatDouble(p.value)
        << "," << FormatDouble(p.shap) << "\n";
  }
  return out.str();
}

}  // namespace foglab::explain
