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

#ifndef FOGLAB_MATRIX_H_
#define FOGLAB_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace foglab {

// Dense row-major feature matrix used by the tabular learners. One row per
// example, one column per feature.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<const double> Row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> MutableRow(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }

  const std::vector<double>& values() const { return values_; }

  // Copies the given rows, in order, into a new matrix.
  FeatureMatrix SelectRows(std::span<const std::size_t> rows) const;
  // Copies all rows except column `col`.
  FeatureMatrix DropColumn(std::size_t col) const;

  void AppendRow(std::span<const double> row);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

template <typename T>
std::vector<T> SelectItems(std::span<const T> items,
                           std::span<const std::size_t> index) {
  std::vector<T> out;
  out.reserve(index.size());
  for (std::size_t i : index) out.push_back(items[i]);
  return out;
}

}  // namespace foglab

#endif  // FOGLAB_MATRIX_H_
