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

#include <ostream>
#include <sstream>

#include "foglab/error.h"
#include "foglab/text_io.h"
#include "foglab/trees.h"

namespace foglab::trees {

namespace {

constexpr int kVersion = 1;

void WriteNode(std::ostream& out, const std::vector<TreeNode>& nodes,
               std::size_t at) {
  const TreeNode& node = nodes[at];
  if (node.IsLeaf()) {
    out << "leaf " << node.n0 << " " << node.n1 << " "
        << FormatDouble(node.value) << "\n";
    return;
  }
  out << "split " << node.feature << " " << FormatDouble(node.threshold) << " "
      << node.n0 << " " << node.n1 << " " << FormatDouble(node.value) << "\n";
  WriteNode(out, nodes, node.left);
  WriteNode(out, nodes, node.right);
}

int ReadNode(TokenReader& tokens, std::vector<TreeNode>& nodes,
             std::size_t n_features, std::size_t& budget) {
  if (budget == 0) tokens.Malformed("more nodes than declared");
  --budget;
  const auto kind = tokens.Next();
  TreeNode node;
  if (kind == "split") {
    const long long feature = tokens.Int();
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
      tokens.Malformed("split feature out of range");
    }
    node.feature = static_cast<int>(feature);
    node.threshold = tokens.Real();
  } else if (kind != "leaf") {
    tokens.Malformed("expected 'split' or 'leaf'");
  }
  node.n0 = tokens.Size();
  node.n1 = tokens.Size();
  node.value = tokens.Real();
  const int at = static_cast<int>(nodes.size());
  nodes.push_back(node);
  if (!node.IsLeaf()) {
    const int left = ReadNode(tokens, nodes, n_features, budget);
    const int right = ReadNode(tokens, nodes, n_features, budget);
    nodes[at].left = left;
    nodes[at].right = right;
  }
  return at;
}

void ReadHeader(TokenReader& tokens, std::string_view magic) {
  tokens.Expect(magic);
  if (tokens.Int() != kVersion) tokens.Malformed("unsupported version");
}

}  // namespace

void WriteTree(std::ostream& out, const Tree& tree) {
  out << "tree features=" << tree.n_features << " nodes=" << tree.nodes.size()
      << "\n";
  if (!tree.nodes.empty()) WriteNode(out, tree.nodes, 0);
}

Tree ReadTree(TokenReader& tokens) {
  tokens.Expect("tree");
  Tree tree;
  tree.n_features = tokens.SizeAttribute("features");
  std::size_t budget = tokens.SizeAttribute("nodes");
  const std::size_t declared = budget;
  if (declared > 0) ReadNode(tokens, tree.nodes, tree.n_features, budget);
  if (budget != 0) tokens.Malformed("fewer nodes than declared");
  return tree;
}

void WriteForest(std::ostream& out, const ForestModel& model) {
  const ForestConfig& c = model.config;
  out << "foglab-forest " << kVersion << "\n";
  out << "config n_estimators=" << c.n_estimators
      << " max_depth=" << c.max_depth
      << " min_samples_split=" << c.min_samples_split
      << " min_samples_leaf=" << c.min_samples_leaf
      << " criterion=" << CriterionName(c.criterion)
      << " splitter=" << SplitterName(c.splitter)
      << " bootstrap=" << (c.bootstrap ? 1 : 0)
      << " max_features=" << MaxFeaturesName(c.max_features)
      << " seed=" << c.seed << "\n";
  out << "features " << model.n_features << "\n";
  out << "trees " << model.trees.size() << "\n";
  for (const Tree& tree : model.trees) WriteTree(out, tree);
  out << "end-forest\n";
}

ForestModel ReadForest(TokenReader& tokens) {
  ReadHeader(tokens, "foglab-forest");
  ForestModel model;
  ForestConfig& c = model.config;
  tokens.Expect("config");
  c.n_estimators = tokens.SizeAttribute("n_estimators");
  c.max_depth = tokens.SizeAttribute("max_depth");
  c.min_samples_split = tokens.SizeAttribute("min_samples_split");
  c.min_samples_leaf = tokens.SizeAttribute("min_samples_leaf");
  const auto criterion = ParseCriterion(tokens.Attribute("criterion"));
  if (!criterion) tokens.Malformed("unknown criterion");
  c.criterion = *criterion;
  const auto splitter = ParseSplitter(tokens.Attribute("splitter"));
  if (!splitter) tokens.Malformed("unknown splitter");
  c.splitter = *splitter;
  c.bootstrap = tokens.SizeAttribute("bootstrap") != 0;
  const auto max_features = ParseMaxFeatures(tokens.Attribute("max_features"));
  if (!max_features) tokens.Malformed("unknown max_features");
  c.max_features = *max_features;
  c.seed = tokens.SizeAttribute("seed");
  tokens.Expect("features");
  model.n_features = tokens.Size();
  tokens.Expect("trees");
  const std::size_t count = tokens.Size();
  for (std::size_t t = 0; t < count; ++t) {
    model.trees.push_back(ReadTree(tokens));
    if (model.trees.back().n_features != model.n_features) {
      tokens.Malformed("tree feature count differs from the forest");
    }
  }
  tokens.Expect("end-forest");
  return model;
}

void WriteGbm(std::ostream& out, const GbmModel& model) {
  const GbmConfig& c = model.config;
  out << "foglab-gbm " << kVersion << "\n";
  out << "config iterations=" << c.iterations << " depth=" << c.depth
      << " learning_rate=" << FormatDouble(c.learning_rate)
      << " l2_leaf_reg=" << FormatDouble(c.l2_leaf_reg) << " seed=" << c.seed
      << "\n";
  out << "features " << model.n_features << "\n";
  out << "base_score " << FormatDouble(model.base_score) << "\n";
  out << "trees " << model.trees.size() << "\n";
  for (const Tree& tree : model.trees) WriteTree(out, tree);
  out << "end-gbm\n";
}

GbmModel ReadGbm(TokenReader& tokens) {
  ReadHeader(tokens, "foglab-gbm");
  GbmModel model;
  GbmConfig& c = model.config;
  tokens.Expect("config");
  c.iterations = tokens.SizeAttribute("iterations");
  c.depth = tokens.SizeAttribute("depth");
  c.learning_rate = tokens.RealAttribute("learning_rate");
  c.l2_leaf_reg = tokens.RealAttribute("l2_leaf_reg");
  c.seed = tokens.SizeAttribute("seed");
  tokens.Expect("features");
  model.n_features = tokens.Size();
  tokens.Expect("base_score");
  model.base_score = tokens.Real();
  tokens.Expect("trees");
  const std::size_t count = tokens.Size();
  for (std::size_t t = 0; t < count; ++t) {
    model.trees.push_back(ReadTree(tokens));
    if (model.trees.back().n_features != model.n_features) {
      tokens.Malformed("tree feature count differs from the model");
    }
  }
  tokens.Expect("end-gbm");
  return model;
}

std::string FormatTree(const Tree& tree) {
  std::ostringstream out;
  out << "foglab-tree " << kVersion << "\n";
  WriteTree(out, tree);
  return out.str();
}

Tree ParseTree(std::string_view text) {
  TokenReader tokens(text, "tree file");
  ReadHeader(tokens, "foglab-tree");
  Tree tree = ReadTree(tokens);
  if (!tokens.AtEnd()) tokens.Malformed("trailing content");
  return tree;
}

std::string FormatForest(const ForestModel& model) {
  std::ostringstream out;
  WriteForest(out, model);
  return out.str();
}

ForestModel ParseForest(std::string_view text) {
  TokenReader tokens(text, "forest file");
  ForestModel model = ReadForest(tokens);
  if (!tokens.AtEnd()) tokens.Malformed("trailing content");
  return model;
}

std::string FormatGbm(const GbmModel& model) {
  std::ostringstream out;
  WriteGbm(out, model);
  return out.str();
}

GbmModel ParseGbm(std::string_view text) {
  TokenReader tokens(text, "gbm file");
  GbmModel model = ReadGbm(tokens);
  if (!tokens.AtEnd()) tokens.Malformed("trailing content");
  return model;
}

}  // namespace foglab::trees
