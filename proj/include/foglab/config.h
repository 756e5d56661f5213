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

#ifndef FOGLAB_CONFIG_H_
#define FOGLAB_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foglab/data.h"
#include "foglab/fed.h"
#include "foglab/stacking.h"
#include "foglab/trees.h"

namespace foglab::config {

inline constexpr std::string_view kSchemaVersion = "foglab-config/1";

// One CSV input. `user_id` tags every row of the file; leave it unset when
// the column map names a user column instead.
struct SourceSpec {
  std::string path;
  std::optional<int> user_id;
};

struct DataSection {
  std::vector<SourceSpec> sources;
  data::ColumnSchema columns;
  // Canonical dataset written by ingest/synth and read by every other
  // command. Empty: <output_dir>/dataset.csv.
  std::string dataset;
  data::SyntheticConfig synthetic;
};

// Tabular split shared by train-central, nested-cv and explain.
struct CentralSection {
  std::vector<std::string> models{"random_forest", "extra_trees", "gbm",
                                  "stack"};
  double test_fraction = 0.2;
  bool stratified = true;
  // Majority undersampling before the split; unset keeps every row.
  std::optional<double> balance_ratio;
  std::uint64_t seed = 42;
};

struct ModelsSection {
  trees::ForestConfig random_forest;
  trees::ForestConfig extra_trees;
  trees::GbmConfig gbm;
  stacking::LogisticConfig logistic;
  stacking::StackConfig stack;

  ModelsSection();
};

struct NestedCvSection {
  std::string model = "random_forest";
  std::size_t outer_k = 10;
  std::size_t inner_k = 3;
  std::uint64_t seed = 42;
  // Fully resolved grid points. An empty grid means one point, the model's
  // configuration under `models`.
  std::vector<stacking::LearnerConfig> grid;
};

struct ExplainSection {
  // Empty: <output_dir>/models/stack.model.
  std::string model_file;
  std::size_t max_rows = 100;
  std::size_t background_rows = 50;
  std::uint64_t seed = 42;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  DataSection data;
  CentralSection central;
  ModelsSection models;
  NestedCvSection nested_cv;
  ExplainSection explain;
  fed::FedConfig federated;

  std::filesystem::path OutputDir() const { return output_dir; }
  std::filesystem::path DatasetPath() const;
  std::filesystem::path ModelFile() const;
  void Validate() const;
};

// Column map of the canonical dataset file.
data::ColumnSchema CanonicalSchema();

// Model names accepted by central.models and nested_cv.model.
const std::vector<std::string>& ModelNames();
stacking::LearnerConfig ModelConfig(const ExperimentConfig& config,
                                    std::string_view name);

// Parses config text (JSON). Keys outside the schema, wrong value types and
// a foreign schema version are kSchema errors. Component seeds left out of
// the text inherit the top-level seed. Relative paths resolve against
// `base_dir`. `overrides` are "dotted.key=value" pairs applied to scalar
// keys before parsing.
ExperimentConfig ParseConfig(std::string_view text,
                             const std::vector<std::string>& overrides = {},
                             const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

// Every key with its effective value. ParseConfig(ResolvedJson(c)) == c.
std::string ResolvedJson(const ExperimentConfig& config);

}  // namespace foglab::config

#endif  // FOGLAB_CONFIG_H_
