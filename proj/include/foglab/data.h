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

#ifndef FOGLAB_DATA_H_
#define FOGLAB_DATA_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foglab/matrix.h"

namespace foglab::data {

// Tabular learners see time plus the six inertial channels, in this order.
inline constexpr std::size_t kNumFeatures = 7;
// The neural model sees only the six inertial channels.
inline constexpr std::size_t kNumChannels = 6;

const std::array<std::string, kNumFeatures>& FeatureNames();

// One labelled IMU reading. Accelerations in g, angular velocities in deg/s.
struct ImuSample {
  double time_s = 0.0;
  double acc_ml = 0.0;
  double acc_ap = 0.0;
  double acc_si = 0.0;
  double gyr_ml = 0.0;
  double gyr_ap = 0.0;
  double gyr_si = 0.0;
  int label = 0;  // 1 = freezing episode.
  int user_id = 0;

  std::array<double, kNumFeatures> Features() const {
    return {time_s, acc_ml, acc_ap, acc_si, gyr_ml, gyr_ap, gyr_si};
  }
  std::array<double, kNumChannels> Channels() const {
    return {acc_ml, acc_ap, acc_si, gyr_ml, gyr_ap, gyr_si};
  }

  bool operator==(const ImuSample&) const = default;
};

struct ImuDataset {
  std::vector<ImuSample> samples;
  std::vector<std::string> feature_names{FeatureNames().begin(),
                                         FeatureNames().end()};
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  std::size_t CountLabel(int label) const;

  // Rows of Features(), one per sample.
  FeatureMatrix ToFeatureMatrix() const;
  std::vector<int> Labels() const;
  ImuDataset Select(std::span<const std::size_t> index) const;
};

// Maps dataset fields to CSV header names. The defaults follow the column
// titles of the public freezing-of-gait IMU exports.
struct ColumnSchema {
  std::string time_s = "Time [s]";
  std::string acc_ml = "ACC ML [g]";
  std::string acc_ap = "ACC AP [g]";
  std::string acc_si = "ACC SI [g]";
  std::string gyr_ml = "GYR ML [deg/s]";
  std::string gyr_ap = "GYR AP [deg/s]";
  std::string gyr_si = "GYR SI [deg/s]";
  std::string label = "Freezing event [flag]";
  std::optional<std::string> user_id;  // Absent: every row gets user 0.
};

// Counts of what happened to the data rows of one ingest.
struct IngestReport {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  // Reason -> rejected row count.
  std::map<std::string, std::size_t> rejected;

  std::size_t RowsRejected() const;
  // Structured key-value rendering ("key = value" per line).
  std::string ToText() const;
};

// Parses CSV text. Rows with an empty numeric cell are rejected and counted;
// any other malformed cell is an error naming the 1-based data row.
ImuDataset ParseCsv(std::string_view text, const ColumnSchema& schema,
                    IngestReport* report = nullptr);
ImuDataset LoadCsv(const std::filesystem::path& path,
                   const ColumnSchema& schema, IngestReport* report = nullptr);

// Writes a header plus one row per sample. A user column is written when the
// schema names one.
std::string FormatCsv(const ImuDataset& dataset, const ColumnSchema& schema);
void WriteCsv(const ImuDataset& dataset, const std::filesystem::path& path,
              const ColumnSchema& schema);

// Concatenates datasets, tagging each one's samples with its user id.
ImuDataset MergeUsers(std::span<const ImuDataset> datasets,
                      std::span<const int> user_ids);

// Indices (ascending) kept after random undersampling of the majority class
// down to at most `target_ratio` times the minority count.
std::vector<std::size_t> BalanceIndices(std::span<const int> labels,
                                        double target_ratio,
                                        std::uint64_t seed);
ImuDataset DownsampleBalance(const ImuDataset& dataset, double target_ratio,
                             std::uint64_t seed);

enum class LabelRule { kMajority, kAnyPositive, kLastSample };

std::optional<LabelRule> ParseLabelRule(std::string_view name);
std::string_view LabelRuleName(LabelRule rule);

// Applies `rule` to one window's sample labels. Majority ties go to 1.
int WindowLabel(std::span<const int> labels, LabelRule rule);

// Fixed-length multichannel windows, stored window-major, then time, then
// channel.
struct WindowSet {
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<int> user_ids;
  std::size_t window_len = 0;
  std::size_t stride = 0;
  std::size_t channels = kNumChannels;

  std::size_t size() const { return labels.size(); }
  std::size_t WindowValues() const { return window_len * channels; }
  std::span<const double> Window(std::size_t i) const {
    return {values.data() + i * WindowValues(), WindowValues()};
  }
  std::size_t CountLabel(int label) const;
  WindowSet Select(std::span<const std::size_t> index) const;
  void Append(const WindowSet& other);
};

// Number of windows one user of `length` samples contributes.
std::size_t WindowCount(std::size_t length, std::size_t window_len,
                        std::size_t stride);

// Cuts windows per user (users in ascending id order, samples in dataset
// order). Users shorter than `window_len` contribute nothing.
WindowSet MakeWindows(const ImuDataset& dataset, std::size_t window_len,
                      std::size_t stride,
                      LabelRule rule = LabelRule::kMajority);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  bool stratified = true;
};

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded disjoint split of [0, labels.size()). Both sides sorted ascending.
IndexSplit SplitIndices(std::span<const int> labels, const SplitSpec& spec);

std::pair<ImuDataset, ImuDataset> TrainTestSplit(const ImuDataset& dataset,
                                                 const SplitSpec& spec);
std::pair<WindowSet, WindowSet> TrainTestSplit(const WindowSet& windows,
                                               const SplitSpec& spec);

using Fold = IndexSplit;

// k disjoint test folds covering [0, n) with sizes differing by at most one.
// With labels, each class is dealt across folds so per-fold class counts
// differ by at most one as well.
std::vector<Fold> KFoldIndices(std::size_t n, std::size_t k,
                               std::optional<std::span<const int>> labels,
                               std::uint64_t seed);

struct UserPartition {
  std::map<int, ImuDataset> users;
  // Users below the threshold, with their sample counts.
  std::map<int, std::size_t> excluded;
};

UserPartition PartitionByUser(const ImuDataset& dataset,
                              std::size_t min_samples);

// Pseudo-IMU fixture generator. Each user alternates walking segments and
// freezing episodes. Walking is Gaussian noise around per-user channel means
// plus a slow gait oscillation; freezing shifts every channel mean by
// `separation` noise standard deviations (per-user direction perturbed by
// `user_heterogeneity`), widens the noise by 1.5x and swaps the gait
// oscillation for a faster tremor.
struct SyntheticConfig {
  int users = 3;
  int samples_per_user = 2000;
  double positive_ratio = 0.5;
  double separation = 1.0;
  double user_heterogeneity = 0.5;
  double sample_rate_hz = 128.0;
  std::uint64_t seed = 7;
};

ImuDataset GenerateSynthetic(const SyntheticConfig& config);

}  // namespace foglab::data

#endif  // FOGLAB_DATA_H_
