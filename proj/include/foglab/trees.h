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

#ifndef FOGLAB_TREES_H_
#define FOGLAB_TREES_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "foglab/matrix.h"
#include "foglab/text_io.h"

namespace foglab::trees {

enum class Criterion { kGini, kEntropy };
enum class Splitter { kBest, kRandom };
enum class MaxFeatures { kSqrt, kAll };

std::string_view CriterionName(Criterion c);
std::optional<Criterion> ParseCriterion(std::string_view name);
std::string_view SplitterName(Splitter s);
std::optional<Splitter> ParseSplitter(std::string_view name);
std::string_view MaxFeaturesName(MaxFeatures m);
std::optional<MaxFeatures> ParseMaxFeatures(std::string_view name);

// Gini: 1 - sum p^2. Entropy: -sum p log2 p.
double Impurity(double n0, double n1, Criterion criterion);

// A node is internal when `feature` is set; x[feature] <= threshold goes
// left. Leaves keep the class counts that reached them (classification) and
// a value: the positive-class frequency, or the Newton step for boosting
// trees.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double value = 0.0;

  bool IsLeaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Nodes in preorder; node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;
  std::size_t n_features = 0;

  double Predict(std::span<const double> x) const;
  std::size_t Depth() const;
  std::size_t LeafCount() const;
  bool operator==(const Tree&) const = default;
};

struct TreeConfig {
  std::size_t max_depth = 0;  // 0 = unlimited.
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  Criterion criterion = Criterion::kGini;
  Splitter splitter = Splitter::kBest;
  MaxFeatures max_features = MaxFeatures::kAll;
};

// Greedy recursive partitioning. `rows` selects (possibly repeated) training
// rows; empty means all rows once. The best splitter scans midpoints between
// consecutive distinct values; the random splitter draws one uniform
// threshold per candidate feature. Equal gains go to the lowest feature
// index, then the lowest threshold.
Tree FitTree(const FeatureMatrix& x, std::span<const int> y,
             const TreeConfig& config, std::uint64_t seed,
             std::span<const std::size_t> rows = {});

// n draws with replacement, seeded.
std::vector<std::size_t> BootstrapIndices(std::size_t n, std::uint64_t seed);

struct ForestConfig {
  std::size_t n_estimators = 100;
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  Criterion criterion = Criterion::kGini;
  Splitter splitter = Splitter::kBest;
  bool bootstrap = true;
  MaxFeatures max_features = MaxFeatures::kSqrt;
  std::uint64_t seed = 0;

  // Bootstrapped, optimised splits.
  static ForestConfig RandomForest();
  // Whole sample, random thresholds.
  static ForestConfig ExtraTrees();

  TreeConfig Tree() const;
  void Validate() const;
  bool operator==(const ForestConfig&) const = default;
};

struct ForestModel {
  ForestConfig config;
  std::size_t n_features = 0;
  std::vector<Tree> trees;
};

// Tree t uses seed config.seed + t for its bag and split randomness.
ForestModel FitForest(const FeatureMatrix& x, std::span<const int> y,
                      const ForestConfig& config);

struct GbmConfig {
  std::size_t iterations = 50;
  std::size_t depth = 3;
  double learning_rate = 0.01;
  double l2_leaf_reg = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const GbmConfig&) const = default;
};

// Logistic-loss boosting on raw scores: F = base_score + learning_rate *
// sum of tree values.
struct GbmModel {
  GbmConfig config;
  std::size_t n_features = 0;
  double base_score = 0.0;
  std::vector<Tree> trees;
};

GbmModel FitGbm(const FeatureMatrix& x, std::span<const int> y,
                const GbmConfig& config);

std::vector<double> PredictProba(const Tree& tree, const FeatureMatrix& x);
std::vector<double> PredictProba(const ForestModel& model,
                                 const FeatureMatrix& x);
std::vector<double> PredictRaw(const GbmModel& model, const FeatureMatrix& x);
std::vector<double> PredictProba(const GbmModel& model, const FeatureMatrix& x);

// Versioned preorder text dumps. Thresholds and values use shortest
// round-trip formatting.
std::string FormatTree(const Tree& tree);
Tree ParseTree(std::string_view text);
std::string FormatForest(const ForestModel& model);
ForestModel ParseForest(std::string_view text);
std::string FormatGbm(const GbmModel& model);
GbmModel ParseGbm(std::string_view text);

// Stream forms used when a model is embedded in a larger file.
void WriteTree(std::ostream& out, const Tree& tree);
Tree ReadTree(TokenReader& tokens);
void WriteForest(std::ostream& out, const ForestModel& model);
ForestModel ReadForest(TokenReader& tokens);
void WriteGbm(std::ostream& out, const GbmModel& model);
GbmModel ReadGbm(TokenReader& tokens);

}  // namespace foglab::trees

#endif  // FOGLAB_TREES_H_
