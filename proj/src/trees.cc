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
#include <numeric>
#include <random>

#include "foglab/error.h"

namespace foglab::trees {

std::string_view CriterionName(Criterion c) {
  return c == Criterion::kGini ? "gini" : "entropy";
}

std::optional<Criterion> ParseCriterion(std::string_view name) {
  if (name == "gini") return Criterion::kGini;
  if (name == "entropy") return Criterion::kEntropy;
  return std::nullopt;
}

std::string_view SplitterName(Splitter s) {
  return s == Splitter::kBest ? "best" : "random";
}

std::optional<Splitter> ParseSplitter(std::string_view name) {
  if (name == "best") return Splitter::kBest;
  if (name == "random") return Splitter::kRandom;
  return std::nullopt;
}

std::string_view MaxFeaturesName(MaxFeatures m) {
  return m == MaxFeatures::kSqrt ? "sqrt" : "all";
}

std::optional<MaxFeatures> ParseMaxFeatures(std::string_view name) {
  if (name == "sqrt") return MaxFeatures::kSqrt;
  if (name == "all") return MaxFeatures::kAll;
  return std::nullopt;
}

double Impurity(double n0, double n1, Criterion criterion) {
  const double n = n0 + n1;
  if (n <= 0.0) return 0.0;
  const double p0 = n0 / n;
  const double p1 = n1 / n;
  if (criterion == Criterion::kGini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

double Tree::Predict(std::span<const double> x) const {
  if (nodes.empty()) Fail(ErrorKind::kArgument, "predict on an empty tree");
  if (x.size() != n_features) {
    Fail(ErrorKind::kArgument, "tree expects " + std::to_string(n_features) +
                                   " features, got " +
                                   std::to_string(x.size()));
  }
  std::size_t at = 0;
  while (!nodes[at].IsLeaf()) {
    const TreeNode& node = nodes[at];
    at = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[at].value;
}

namespace {

std::size_t DepthFrom(const std::vector<TreeNode>& nodes, std::size_t at) {
  const TreeNode& node = nodes[at];
  if (node.IsLeaf()) return 0;
  return 1 + std::max(DepthFrom(nodes, node.left), DepthFrom(nodes, node.right));
}

}  // namespace

std::size_t Tree::Depth() const {
  return nodes.empty() ? 0 : DepthFrom(nodes, 0);
}

std::size_t Tree::LeafCount() const {
  return std::count_if(nodes.begin(), nodes.end(),
                       [](const TreeNode& n) { return n.IsLeaf(); });
}

namespace {

void CheckInputs(const FeatureMatrix& x, std::span<const int> y) {
  if (x.rows() == 0 || x.cols() == 0) {
    Fail(ErrorKind::kArgument, "tree fit needs at least one row and column");
  }
  if (y.size() != x.rows()) {
    Fail(ErrorKind::kArgument, "label count does not match row count");
  }
  for (int v : y) {
    if (v != 0 && v != 1) Fail(ErrorKind::kArgument, "labels must be 0 or 1");
  }
}

void RequireBothClasses(std::span<const int> y, const char* what) {
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<long>(y.size())) {
    Fail(ErrorKind::kValidation,
         std::string(what) + " needs both classes in the training labels");
  }
}

// Per-row sufficient statistics. Classification trees use (1 - y, y) as
// (a, b) and score by impurity; boosting trees use (g, h).
struct Stats {
  double a = 0.0;
  double b = 0.0;
  void Add(double da, double db) {
    a += da;
    b += db;
  }
};

struct Candidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

class Builder {
 public:
  using Sorted = std::vector<std::vector<std::size_t>>;

  enum class Kind { kClassify, kRegress };

  Builder(const FeatureMatrix& x, Kind kind, std::span<const double> a,
          std::span<const double> b, const TreeConfig& config,
          double l2, std::uint64_t seed)
      : x_(x), kind_(kind), a_(a), b_(b), config_(config), l2_(l2),
        rng_(seed) {}

  // `presorted` holds, per feature, all row indices ordered by (value,
  // index); required for the best splitter.
  Tree Build(std::vector<std::size_t> rows, const Sorted* presorted) {
    Tree tree;
    tree.n_features = x_.cols();
    nodes_.clear();
    // The best splitter keeps each node's rows sorted by every feature;
    // children inherit the order through stable partitioning.
    Sorted sorted;
    if (config_.splitter == Splitter::kBest) {
      std::vector<std::uint32_t> count(x_.rows(), 0);
      for (std::size_t r : rows) ++count[r];
      sorted.resize(x_.cols());
      for (std::size_t f = 0; f < x_.cols(); ++f) {
        sorted[f].reserve(rows.size());
        for (std::size_t r : (*presorted)[f]) {
          sorted[f].insert(sorted[f].end(), count[r], r);
        }
      }
    }
    Grow(rows, sorted, 0);
    tree.nodes = std::move(nodes_);
    return tree;
  }

 private:
  Stats Sum(const std::vector<std::size_t>& rows) const {
    Stats s;
    for (std::size_t r : rows) s.Add(a_[r], b_[r]);
    return s;
  }

  // Node score; the split gain is parent score minus the children's.
  // Classification: count-weighted impurity. Regression: -G^2/(H+l2).
  double Score(const Stats& s) const {
    if (kind_ == Kind::kClassify) {
      return (s.a + s.b) * Impurity(s.a, s.b, config_.criterion);
    }
    return -(s.a * s.a) / (s.b + l2_);
  }

  double LeafValue(const Stats& s) const {
    if (kind_ == Kind::kClassify) return s.b / (s.a + s.b);
    return -s.a / (s.b + l2_);
  }

  int Emit(const std::vector<std::size_t>& rows) {
    const Stats s = Sum(rows);
    TreeNode leaf;
    leaf.value = LeafValue(s);
    if (kind_ == Kind::kClassify) {
      leaf.n0 = static_cast<std::size_t>(std::llround(s.a));
      leaf.n1 = static_cast<std::size_t>(std::llround(s.b));
    } else {
      leaf.n0 = rows.size();
    }
    nodes_.push_back(leaf);
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<int> CandidateFeatures(const std::vector<std::size_t>& rows) {
    std::vector<int> live;
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      const double first = x_(rows.front(), f);
      for (std::size_t r : rows) {
        if (x_(r, f) != first) {
          live.push_back(static_cast<int>(f));
          break;
        }
      }
    }
    if (config_.max_features == MaxFeatures::kSqrt) {
      const auto k = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(x_.cols()))));
      if (live.size() > k) {
        std::shuffle(live.begin(), live.end(), rng_);
        live.resize(k);
        std::sort(live.begin(), live.end());
      }
    }
    return live;
  }

  // Scores within rounding noise of the incumbent count as ties, so the
  // earlier (lower feature, lower threshold) candidate is kept.
  void Consider(Candidate& best, int feature, double threshold, double score) {
    const double slack = 1e-12 * std::max(1.0, std::abs(best.score));
    if (!best.found || score < best.score - slack) {
      best = {true, feature, threshold, score};
    }
  }

  void ScanBest(const std::vector<std::size_t>& order, const Stats& total,
                int f, Candidate& best) {
    const std::size_t msl = MinLeaf();
    Stats left;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left.Add(a_[order[i]], b_[order[i]]);
      const double lo = x_(order[i], f);
      const double hi = x_(order[i + 1], f);
      if (lo == hi) continue;
      const std::size_t n_left = i + 1;
      if (n_left < msl || order.size() - n_left < msl) continue;
      Stats right{total.a - left.a, total.b - left.b};
      double threshold = lo + (hi - lo) / 2.0;
      if (threshold >= hi) threshold = lo;
      Consider(best, f, threshold, Score(left) + Score(right));
    }
  }

  void ScanRandom(const std::vector<std::size_t>& rows, int f,
                  Candidate& best) {
    double lo = x_(rows.front(), f);
    double hi = lo;
    for (std::size_t r : rows) {
      lo = std::min(lo, x_(r, f));
      hi = std::max(hi, x_(r, f));
    }
    const double threshold = std::uniform_real_distribution<double>(lo, hi)(rng_);
    Stats left, right;
    std::size_t n_left = 0;
    for (std::size_t r : rows) {
      if (x_(r, f) <= threshold) {
        left.Add(a_[r], b_[r]);
        ++n_left;
      } else {
        right.Add(a_[r], b_[r]);
      }
    }
    const std::size_t msl = MinLeaf();
    if (n_left < msl || rows.size() - n_left < msl) return;
    Consider(best, f, threshold, Score(left) + Score(right));
  }

  std::size_t MinLeaf() const { return std::max<std::size_t>(1, config_.min_samples_leaf); }

  int Grow(const std::vector<std::size_t>& rows, const Sorted& sorted,
           std::size_t depth) {
    const Stats s = Sum(rows);
    const bool depth_done = config_.max_depth > 0 && depth >= config_.max_depth;
    const bool pure = kind_ == Kind::kClassify && (s.a == 0.0 || s.b == 0.0);
    if (depth_done || pure || rows.size() < config_.min_samples_split ||
        rows.size() < 2 * MinLeaf()) {
      return Emit(rows);
    }
    Candidate best;
    for (int f : CandidateFeatures(rows)) {
      if (config_.splitter == Splitter::kBest) {
        ScanBest(sorted[f], s, f, best);
      } else {
        ScanRandom(rows, f, best);
      }
    }
    const double gain = best.found ? Score(s) - best.score : 0.0;
    // Impurity splits may have zero gain (e.g. XOR-like data); numerical
    // noise below zero is treated as zero. Boosting splits need a real gain.
    const double tolerance = 1e-12 * std::max(1.0, std::abs(Score(s)));
    const bool accept = best.found && (kind_ == Kind::kClassify
                                           ? gain >= -tolerance
                                           : gain > tolerance);
    if (!accept) return Emit(rows);

    auto goes_left = [&](std::size_t r) {
      return x_(r, best.feature) <= best.threshold;
    };
    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (goes_left(r) ? left : right).push_back(r);
    Sorted sorted_left(sorted.size()), sorted_right(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      for (std::size_t r : sorted[f]) {
        (goes_left(r) ? sorted_left[f] : sorted_right[f]).push_back(r);
      }
    }
    const int at = static_cast<int>(nodes_.size());
    TreeNode node;
    node.feature = best.feature;
    node.threshold = best.threshold;
    if (kind_ == Kind::kClassify) {
      node.n0 = static_cast<std::size_t>(std::llround(s.a));
      node.n1 = static_cast<std::size_t>(std::llround(s.b));
    } else {
      node.n0 = rows.size();
    }
    node.value = LeafValue(s);
    nodes_.push_back(node);
    const int l = Grow(left, sorted_left, depth + 1);
    const int r = Grow(right, sorted_right, depth + 1);
    nodes_[at].left = l;
    nodes_[at].right = r;
    return at;
  }

  const FeatureMatrix& x_;
  Kind kind_;
  std::span<const double> a_;
  std::span<const double> b_;
  TreeConfig config_;
  double l2_;
  std::mt19937_64 rng_;
  std::vector<TreeNode> nodes_;
};

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

Builder::Sorted Presort(const FeatureMatrix& x) {
  Builder::Sorted sorted(x.cols(), AllRows(x.rows()));
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::stable_sort(sorted[f].begin(), sorted[f].end(),
                     [&](std::size_t i, std::size_t j) {
                       return x(i, f) < x(j, f);
                     });
  }
  return sorted;
}

std::vector<std::size_t> CheckedRows(const FeatureMatrix& x,
                                     std::span<const std::size_t> rows) {
  if (rows.empty()) return AllRows(x.rows());
  for (std::size_t r : rows) {
    if (r >= x.rows()) Fail(ErrorKind::kArgument, "row index out of range");
  }
  return {rows.begin(), rows.end()};
}

Tree FitClassifier(const FeatureMatrix& x, std::span<const int> y,
                   const TreeConfig& config, std::uint64_t seed,
                   std::vector<std::size_t> rows,
                   const Builder::Sorted* presorted) {
  std::vector<double> a(y.size()), b(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    a[i] = y[i] == 0 ? 1.0 : 0.0;
    b[i] = y[i] == 1 ? 1.0 : 0.0;
  }
  Builder builder(x, Builder::Kind::kClassify, a, b, config, 0.0, seed);
  return builder.Build(std::move(rows), presorted);
}

}  // namespace

Tree FitTree(const FeatureMatrix& x, std::span<const int> y,
             const TreeConfig& config, std::uint64_t seed,
             std::span<const std::size_t> rows) {
  CheckInputs(x, y);
  if (config.min_samples_split < 2) {
    Fail(ErrorKind::kArgument, "min_samples_split must be at least 2");
  }
  Builder::Sorted presorted;
  if (config.splitter == Splitter::kBest) presorted = Presort(x);
  return FitClassifier(x, y, config, seed, CheckedRows(x, rows), &presorted);
}

std::vector<std::size_t> BootstrapIndices(std::size_t n, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0xB007u};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

ForestConfig ForestConfig::RandomForest() {
  ForestConfig c;
  c.bootstrap = true;
  c.splitter = Splitter::kBest;
  c.max_features = MaxFeatures::kSqrt;
  return c;
}

ForestConfig ForestConfig::ExtraTrees() {
  ForestConfig c;
  c.bootstrap = false;
  c.splitter = Splitter::kRandom;
  c.max_features = MaxFeatures::kSqrt;
  return c;
}

TreeConfig ForestConfig::Tree() const {
  TreeConfig t;
  t.max_depth = max_depth;
  t.min_samples_split = min_samples_split;
  t.min_samples_leaf = min_samples_leaf;
  t.criterion = criterion;
  t.splitter = splitter;
  t.max_features = max_features;
  return t;
}

void ForestConfig::Validate() const {
  if (n_estimators < 1) Fail(ErrorKind::kArgument, "n_estimators must be >= 1");
  if (min_samples_split < 2) {
    Fail(ErrorKind::kArgument, "min_samples_split must be >= 2");
  }
  if (min_samples_leaf < 1) {
    Fail(ErrorKind::kArgument, "min_samples_leaf must be >= 1");
  }
}

ForestModel FitForest(const FeatureMatrix& x, std::span<const int> y,
                      const ForestConfig& config) {
  config.Validate();
  CheckInputs(x, y);
  RequireBothClasses(y, "forest");
  ForestModel model;
  model.config = config;
  model.n_features = x.cols();
  model.trees.reserve(config.n_estimators);
  const TreeConfig tree_config = config.Tree();
  Builder::Sorted presorted;
  if (config.splitter == Splitter::kBest) presorted = Presort(x);
  for (std::size_t t = 0; t < config.n_estimators; ++t) {
    const std::uint64_t seed = config.seed + t;
    std::vector<std::size_t> bag = config.bootstrap
                                       ? BootstrapIndices(x.rows(), seed)
                                       : AllRows(x.rows());
    model.trees.push_back(
        FitClassifier(x, y, tree_config, seed, std::move(bag), &presorted));
  }
  return model;
}

void GbmConfig::Validate() const {
  if (iterations < 1) Fail(ErrorKind::kArgument, "iterations must be >= 1");
  if (depth < 1) Fail(ErrorKind::kArgument, "depth must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorKind::kArgument, "learning_rate must be > 0");
  }
  if (!(l2_leaf_reg >= 0.0) || !std::isfinite(l2_leaf_reg)) {
    Fail(ErrorKind::kArgument, "l2_leaf_reg must be >= 0");
  }
}

namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckWidth(std::size_t expected, const FeatureMatrix& x) {
  if (x.cols() != expected) {
    Fail(ErrorKind::kArgument, "model expects " + std::to_string(expected) +
                                   " features, got " +
                                   std::to_string(x.cols()));
  }
}

}  // namespace

GbmModel FitGbm(const FeatureMatrix& x, std::span<const int> y,
                const GbmConfig& config) {
  config.Validate();
  CheckInputs(x, y);
  RequireBothClasses(y, "gbm");
  const std::size_t n = x.rows();
  const double p_bar =
      static_cast<double>(std::count(y.begin(), y.end(), 1)) / n;

  GbmModel model;
  model.config = config;
  model.n_features = x.cols();
  model.base_score = std::log(p_bar / (1.0 - p_bar));

  TreeConfig tc;
  tc.max_depth = config.depth;
  tc.min_samples_split = 2;
  tc.min_samples_leaf = 1;
  tc.splitter = Splitter::kBest;
  tc.max_features = MaxFeatures::kAll;

  const Builder::Sorted presorted = Presort(x);
  std::vector<double> f(n, model.base_score), g(n), h(n);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(f[i]);
      g[i] = p - y[i];
      h[i] = p * (1.0 - p);
    }
    Builder builder(x, Builder::Kind::kRegress, g, h, tc, config.l2_leaf_reg,
                    config.seed + it);
    Tree tree = builder.Build(AllRows(n), &presorted);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] += config.learning_rate * tree.Predict(x.Row(i));
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::vector<double> PredictProba(const Tree& tree, const FeatureMatrix& x) {
  CheckWidth(tree.n_features, x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = tree.Predict(x.Row(i));
  return out;
}

std::vector<double> PredictProba(const ForestModel& model,
                                 const FeatureMatrix& x) {
  CheckWidth(model.n_features, x);
  if (model.trees.empty()) Fail(ErrorKind::kArgument, "forest has no trees");
  std::vector<double> out(x.rows(), 0.0);
  for (const Tree& tree : model.trees) {
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] += tree.Predict(x.Row(i));
  }
  const double k = static_cast<double>(model.trees.size());
  for (double& v : out) v /= k;
  return out;
}

std::vector<double> PredictRaw(const GbmModel& model, const FeatureMatrix& x) {
  CheckWidth(model.n_features, x);
  std::vector<double> out(x.rows(), model.base_score);
  for (const Tree& tree : model.trees) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out[i] += model.config.learning_rate * tree.Predict(x.Row(i));
    }
  }
  return out;
}

std::vector<double> PredictProba(const GbmModel& model,
                                 const FeatureMatrix& x) {
  std::vector<double> out = PredictRaw(model, x);
  for (double& v : out) v = Sigmoid(v);
  return out;
}

}  // namespace foglab::trees
