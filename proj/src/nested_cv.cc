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

#include <algorithm>
#include <sstream>

#include "foglab/data.h"
#include "foglab/error.h"
#include "foglab/eval.h"
#include "foglab/text_io.h"

namespace foglab::eval {

namespace {

void RequireBothClasses(std::span<const int> y, const std::string& where) {
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<long>(y.size())) {
    Fail(ErrorKind::kValidation, "cannot stratify: " + where +
                                     " training split holds a single class");
  }
}

double ScoreFold(const FitPredict& fit_predict, std::size_t grid_index,
                 const FeatureMatrix& x, std::span<const int> y,
                 const data::Fold& fold, const std::string& where) {
  const auto y_train = SelectItems<int>(y, fold.train);
  RequireBothClasses(y_train, where);
  const auto probs = fit_predict(grid_index, x.SelectRows(fold.train), y_train,
                                 x.SelectRows(fold.test));
  if (probs.size() != fold.test.size()) {
    Fail(ErrorKind::kRuntime, "learner returned the wrong number of scores");
  }
  const auto y_test = SelectItems<int>(y, fold.test);
  return Accuracy(Confusion(HardLabels(probs), y_test));
}

}  // namespace

std::vector<double> NestedCvResult::Accuracies() const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(f.accuracy);
  return out;
}

std::string NestedCvResult::ToCsv() const {
  std::ostringstream out;
  out << "fold,accuracy,chosen\n";
  for (std::size_t i = 0; i < folds.size(); ++i) {
    out << (i + 1) << "," << FormatDouble(folds[i].accuracy) << ","
        << folds[i].chosen << "\n";
  }
  out << "mean," << FormatDouble(mean) << ",\n";
  out << "std," << FormatDouble(std) << ",\n";
  return out.str();
}

NestedCvResult NestedCv(const FitPredict& fit_predict, std::size_t grid_size,
                        const FeatureMatrix& x, std::span<const int> y,
                        const NestedCvConfig& config) {
  if (grid_size == 0) Fail(ErrorKind::kArgument, "empty hyperparameter grid");
  if (config.outer_k < 2 || config.inner_k < 2) {
    Fail(ErrorKind::kArgument, "nested CV needs outer_k and inner_k >= 2");
  }
  if (y.size() != x.rows()) {
    Fail(ErrorKind::kArgument, "label count does not match row count");
  }
  NestedCvResult result;
  const auto outer = data::KFoldIndices(x.rows(), config.outer_k, y, config.seed);
  for (std::size_t o = 0; o < outer.size(); ++o) {
    const std::string where = "outer fold " + std::to_string(o + 1);
    const FeatureMatrix x_outer = x.SelectRows(outer[o].train);
    const auto y_outer = SelectItems<int>(y, outer[o].train);
    RequireBothClasses(y_outer, where);

    NestedCvFold fold;
    fold.test_size = outer[o].test.size();
    if (grid_size > 1) {
      const auto inner = data::KFoldIndices(x_outer.rows(), config.inner_k,
                                            y_outer, config.seed + 1 + o);
      for (std::size_t g = 0; g < grid_size; ++g) {
        double sum = 0.0;
        for (std::size_t i = 0; i < inner.size(); ++i) {
          sum += ScoreFold(fit_predict, g, x_outer, y_outer, inner[i],
                           where + " inner fold " + std::to_string(i + 1));
        }
        fold.inner_accuracy.push_back(sum / static_cast<double>(inner.size()));
      }
      fold.chosen = static_cast<std::size_t>(
          std::max_element(fold.inner_accuracy.begin(),
                           fold.inner_accuracy.end()) -
          fold.inner_accuracy.begin());
    }
    fold.accuracy = ScoreFold(fit_predict, fold.chosen, x, y, outer[o], where);
    result.folds.push_back(std::move(fold));
  }
  const auto acc = result.Accuracies();
  const FoldAggregate agg = AggregateFolds(acc);
  result.mean = agg.mean;
  result.std = agg.std;
  return result;
}

}  // namespace foglab::eval
