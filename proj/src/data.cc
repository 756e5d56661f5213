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

#include "foglab/data.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "foglab/error.h"
#include "foglab/text_io.h"

namespace foglab {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    Fail(ErrorKind::kArgument, "FeatureMatrix: value count does not match "
                               "rows x cols");
  }
}

FeatureMatrix FeatureMatrix::SelectRows(
    std::span<const std::size_t> rows) const {
  FeatureMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(values_.begin() + rows[i] * cols_, cols_,
                out.values_.begin() + i * cols_);
  }
  return out;
}

FeatureMatrix FeatureMatrix::DropColumn(std::size_t col) const {
  FeatureMatrix out(rows_, cols_ - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c != col) out(r, k++) = (*this)(r, c);
    }
  }
  return out;
}

void FeatureMatrix::AppendRow(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  if (row.size() != cols_) {
    Fail(ErrorKind::kArgument, "FeatureMatrix: row width mismatch");
  }
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

}  // namespace foglab

namespace foglab::data {

namespace {

constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "time_s", "acc_ml", "acc_ap", "acc_si", "gyr_ml", "gyr_ap", "gyr_si"};

std::string RowPrefix(std::size_t row) {
  return "row " + std::to_string(row) + ": ";
}

void CheckBinary(std::span<const int> labels, const char* what) {
  for (int y : labels) {
    if (y != 0 && y != 1) {
      Fail(ErrorKind::kValidation,
           std::string(what) + ": labels must be 0 or 1");
    }
  }
}

}  // namespace

const std::array<std::string, kNumFeatures>& FeatureNames() {
  static const std::array<std::string, kNumFeatures> names = [] {
    std::array<std::string, kNumFeatures> out;
    for (std::size_t i = 0; i < kNumFeatures; ++i) out[i] = kFeatureNames[i];
    return out;
  }();
  return names;
}

std::size_t ImuDataset::CountLabel(int label) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(),
                    [label](const ImuSample& s) { return s.label == label; }));
}

FeatureMatrix ImuDataset::ToFeatureMatrix() const {
  FeatureMatrix out(samples.size(), kNumFeatures);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto features = samples[i].Features();
    std::copy(features.begin(), features.end(), out.MutableRow(i).begin());
  }
  return out;
}

std::vector<int> ImuDataset::Labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

ImuDataset ImuDataset::Select(std::span<const std::size_t> index) const {
  ImuDataset out;
  out.feature_names = feature_names;
  out.provenance = provenance;
  out.samples.reserve(index.size());
  for (std::size_t i : index) out.samples.push_back(samples[i]);
  return out;
}

std::size_t IngestReport::RowsRejected() const {
  std::size_t total = 0;
  for (const auto& [reason, count] : rejected) total += count;
  return total;
}

std::string IngestReport::ToText() const {
  std::ostringstream out;
  out << "format = foglab-ingest-report/1\n";
  out << "source = " << source << "\n";
  out << "rows_read = " << rows_read << "\n";
  out << "rows_kept = " << rows_kept << "\n";
  out << "rows_rejected = " << RowsRejected() << "\n";
  for (const auto& [reason, count] : rejected) {
    out << "rejected." << reason << " = " << count << "\n";
  }
  return out.str();
}

ImuDataset ParseCsv(std::string_view text, const ColumnSchema& schema,
                    IngestReport* report) {
  IngestReport local_report;
  IngestReport& rep = report ? *report : local_report;
  rep.rows_read = rep.rows_kept = 0;
  rep.rejected.clear();

  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = end + 1;
    }
  }
  if (lines.empty() || Trim(lines.front()).empty()) {
    Fail(ErrorKind::kSchema, "missing header row");
  }

  const auto header = SplitFields(lines.front());
  auto find_column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (Trim(header[i]) == name) return i;
    }
    Fail(ErrorKind::kSchema, "missing column '" + name + "'");
  };
  const std::array<const std::string*, 7> numeric_names = {
      &schema.time_s, &schema.acc_ml, &schema.acc_ap, &schema.acc_si,
      &schema.gyr_ml, &schema.gyr_ap, &schema.gyr_si};
  std::array<std::size_t, 7> numeric_cols{};
  for (std::size_t i = 0; i < numeric_cols.size(); ++i) {
    numeric_cols[i] = find_column(*numeric_names[i]);
  }
  const std::size_t label_col = find_column(schema.label);
  std::optional<std::size_t> user_col;
  if (schema.user_id) user_col = find_column(*schema.user_id);

  ImuDataset dataset;
  std::map<int, double> last_time;
  std::size_t row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (Trim(lines[li]).empty()) continue;
    ++row;
    ++rep.rows_read;
    const auto fields = SplitFields(lines[li]);
    auto cell = [&](std::size_t col) -> std::string_view {
      return col < fields.size() ? Trim(fields[col]) : std::string_view{};
    };

    bool missing = cell(label_col).empty() ||
                   (user_col && cell(*user_col).empty());
    for (std::size_t col : numeric_cols) missing |= cell(col).empty();
    if (missing) {
      ++rep.rejected["missing_value"];
      continue;
    }

    std::array<double, 7> values{};
    bool finite = true;
    for (std::size_t i = 0; i < numeric_cols.size(); ++i) {
      const auto parsed = ParseDouble(cell(numeric_cols[i]));
      if (!parsed) {
        Fail(ErrorKind::kParse, RowPrefix(row) + "column '" +
                                    *numeric_names[i] + "': non-numeric value '" +
                                    std::string(cell(numeric_cols[i])) + "'");
      }
      values[i] = *parsed;
      finite &= std::isfinite(*parsed);
    }
    const auto flag = ParseDouble(cell(label_col));
    if (!flag) {
      Fail(ErrorKind::kParse, RowPrefix(row) + "column '" + schema.label +
                                  "': non-numeric value '" +
                                  std::string(cell(label_col)) + "'");
    }
    if (*flag != 0.0 && *flag != 1.0) {
      Fail(ErrorKind::kValidation, RowPrefix(row) + "flag value '" +
                                       std::string(cell(label_col)) +
                                       "' is not 0 or 1");
    }
    int user = 0;
    if (user_col) {
      const auto parsed = ParseInt(cell(*user_col));
      if (!parsed || *parsed < 0) {
        Fail(ErrorKind::kParse, RowPrefix(row) + "column '" + *schema.user_id +
                                    "': invalid user id '" +
                                    std::string(cell(*user_col)) + "'");
      }
      user = static_cast<int>(*parsed);
    }
    if (!finite) {
      ++rep.rejected["non_finite"];
      continue;
    }
    if (values[0] < 0.0) {
      Fail(ErrorKind::kValidation, RowPrefix(row) + "negative time");
    }
    if (auto it = last_time.find(user);
        it != last_time.end() && values[0] < it->second) {
      Fail(ErrorKind::kValidation,
           RowPrefix(row) + "time decreases within user " +
               std::to_string(user));
    }
    last_time[user] = values[0];

    dataset.samples.push_back(ImuSample{values[0], values[1], values[2],
                                        values[3], values[4], values[5],
                                        values[6], static_cast<int>(*flag),
                                        user});
    ++rep.rows_kept;
  }
  return dataset;
}

ImuDataset LoadCsv(const std::filesystem::path& path,
                   const ColumnSchema& schema, IngestReport* report) {
  if (!std::filesystem::exists(path)) {
    Fail(ErrorKind::kValidation, "input file not found: " + path.string());
  }
  ImuDataset dataset = ParseCsv(ReadFile(path), schema, report);
  dataset.provenance = path.filename().string();
  if (report) report->source = path.string();
  return dataset;
}

std::string FormatCsv(const ImuDataset& dataset, const ColumnSchema& schema) {
  std::string out;
  out += schema.time_s + "," + schema.acc_ml + "," + schema.acc_ap + "," +
         schema.acc_si + "," + schema.gyr_ml + "," + schema.gyr_ap + "," +
         schema.gyr_si + "," + schema.label;
  if (schema.user_id) out += "," + *schema.user_id;
  out += "\n";
  for (const auto& s : dataset.samples) {
    for (double v : s.Features()) {
      out += FormatDouble(v);
      out += ',';
    }
    out += std::to_string(s.label);
    if (schema.user_id) out += "," + std::to_string(s.user_id);
    out += '\n';
  }
  return out;
}

void WriteCsv(const ImuDataset& dataset, const std::filesystem::path& path,
              const ColumnSchema& schema) {
  WriteFile(path, FormatCsv(dataset, schema));
}

ImuDataset MergeUsers(std::span<const ImuDataset> datasets,
                      std::span<const int> user_ids) {
  if (datasets.size() != user_ids.size()) {
    Fail(ErrorKind::kArgument, "MergeUsers: dataset and id counts differ");
  }
  std::vector<int> sorted(user_ids.begin(), user_ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    Fail(ErrorKind::kArgument, "MergeUsers: duplicate user id");
  }
  ImuDataset merged;
  std::string provenance;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    for (ImuSample s : datasets[i].samples) {
      s.user_id = user_ids[i];
      merged.samples.push_back(s);
    }
    if (!provenance.empty()) provenance += "+";
    provenance += datasets[i].provenance;
  }
  merged.provenance = provenance;
  return merged;
}

std::vector<std::size_t> BalanceIndices(std::span<const int> labels,
                                        double target_ratio,
                                        std::uint64_t seed) {
  if (!(target_ratio >= 1.0)) {
    Fail(ErrorKind::kArgument, "balance ratio must be >= 1");
  }
  CheckBinary(labels, "balance");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    Fail(ErrorKind::kValidation, "balance: both classes must be present");
  }
  const int majority = by_class[0].size() > by_class[1].size() ? 0 : 1;
  const std::size_t minority_count = by_class[1 - majority].size();
  const auto allowed = static_cast<std::size_t>(
      std::floor(target_ratio * static_cast<double>(minority_count)));

  std::vector<std::size_t> kept = by_class[1 - majority];
  auto& major = by_class[majority];
  if (major.size() > allowed) {
    std::mt19937_64 rng(seed);
    std::shuffle(major.begin(), major.end(), rng);
    major.resize(allowed);
  }
  kept.insert(kept.end(), major.begin(), major.end());
  std::sort(kept.begin(), kept.end());
  return kept;
}

ImuDataset DownsampleBalance(const ImuDataset& dataset, double target_ratio,
                             std::uint64_t seed) {
  const auto labels = dataset.Labels();
  const auto kept = BalanceIndices(labels, target_ratio, seed);
  return dataset.Select(kept);
}

std::optional<LabelRule> ParseLabelRule(std::string_view name) {
  if (name == "majority") return LabelRule::kMajority;
  if (name == "any_positive") return LabelRule::kAnyPositive;
  if (name == "last_sample") return LabelRule::kLastSample;
  return std::nullopt;
}

std::string_view LabelRuleName(LabelRule rule) {
  switch (rule) {
    case LabelRule::kMajority: return "majority";
    case LabelRule::kAnyPositive: return "any_positive";
    case LabelRule::kLastSample: return "last_sample";
  }
  return "majority";
}

int WindowLabel(std::span<const int> labels, LabelRule rule) {
  if (labels.empty()) Fail(ErrorKind::kArgument, "empty window");
  switch (rule) {
    case LabelRule::kMajority: {
      const auto positives = std::count(labels.begin(), labels.end(), 1);
      return 2 * static_cast<std::size_t>(positives) >= labels.size() ? 1 : 0;
    }
    case LabelRule::kAnyPositive:
      return std::find(labels.begin(), labels.end(), 1) != labels.end() ? 1
                                                                        : 0;
    case LabelRule::kLastSample:
      return labels.back();
  }
  return 0;
}

std::size_t WindowSet::CountLabel(int label) const {
  return static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), label));
}

WindowSet WindowSet::Select(std::span<const std::size_t> index) const {
  WindowSet out;
  out.window_len = window_len;
  out.stride = stride;
  out.channels = channels;
  out.values.reserve(index.size() * WindowValues());
  for (std::size_t i : index) {
    const auto w = Window(i);
    out.values.insert(out.values.end(), w.begin(), w.end());
    out.labels.push_back(labels[i]);
    out.user_ids.push_back(user_ids[i]);
  }
  return out;
}

void WindowSet::Append(const WindowSet& other) {
  if (size() == 0 && labels.empty()) {
    window_len = other.window_len;
    stride = other.stride;
    channels = other.channels;
  }
  if (other.window_len != window_len || other.channels != channels) {
    Fail(ErrorKind::kArgument, "WindowSet::Append: shape mismatch");
  }
  values.insert(values.end(), other.values.begin(), other.values.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  user_ids.insert(user_ids.end(), other.user_ids.begin(),
                  other.user_ids.end());
}

std::size_t WindowCount(std::size_t length, std::size_t window_len,
                        std::size_t stride) {
  if (length < window_len) return 0;
  return (length - window_len) / stride + 1;
}

WindowSet MakeWindows(const ImuDataset& dataset, std::size_t window_len,
                      std::size_t stride, LabelRule rule) {
  if (window_len < 1 || stride < 1) {
    Fail(ErrorKind::kArgument, "window_len and stride must be >= 1");
  }
  std::map<int, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    by_user[dataset.samples[i].user_id].push_back(i);
  }
  WindowSet out;
  out.window_len = window_len;
  out.stride = stride;
  out.channels = kNumChannels;
  std::vector<int> window_labels(window_len);
  for (const auto& [user, rows] : by_user) {
    const std::size_t count = WindowCount(rows.size(), window_len, stride);
    for (std::size_t w = 0; w < count; ++w) {
      const std::size_t start = w * stride;
      for (std::size_t t = 0; t < window_len; ++t) {
        const ImuSample& s = dataset.samples[rows[start + t]];
        const auto channels = s.Channels();
        out.values.insert(out.values.end(), channels.begin(), channels.end());
        window_labels[t] = s.label;
      }
      out.labels.push_back(WindowLabel(window_labels, rule));
      out.user_ids.push_back(user);
    }
  }
  if (out.size() == 0) {
    Fail(ErrorKind::kValidation, "no user has at least " +
                                     std::to_string(window_len) +
                                     " samples; window set is empty");
  }
  return out;
}

IndexSplit SplitIndices(std::span<const int> labels, const SplitSpec& spec) {
  const std::size_t n = labels.size();
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    Fail(ErrorKind::kArgument, "test_fraction must lie strictly in (0, 1)");
  }
  if (n < 2) Fail(ErrorKind::kArgument, "split needs at least 2 items");
  std::mt19937_64 rng(spec.seed);
  std::vector<bool> in_test(n, false);

  const auto total_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * spec.test_fraction));
  if (!spec.stratified) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t n_test = std::clamp<std::size_t>(total_test, 1, n - 1);
    for (std::size_t i = 0; i < n_test; ++i) in_test[perm[i]] = true;
  } else {
    CheckBinary(labels, "stratified split");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
    // Largest-remainder allocation keeps the total at round(n * fraction)
    // and every class within one item of its exact quota.
    std::array<double, 2> remainder{};
    std::array<std::size_t, 2> take{};
    std::size_t allocated = 0;
    for (int c = 0; c < 2; ++c) {
      const double quota =
          static_cast<double>(by_class[c].size()) * spec.test_fraction;
      take[c] = static_cast<std::size_t>(std::floor(quota));
      remainder[c] = quota - static_cast<double>(take[c]);
      allocated += take[c];
    }
    const int first = remainder[1] > remainder[0] ? 1 : 0;
    for (int c : {first, 1 - first}) {
      if (allocated < total_test) {
        ++take[c];
        ++allocated;
      }
    }
    for (int c = 0; c < 2; ++c) {
      if (take[c] < 1 || take[c] + 1 > by_class[c].size()) {
        Fail(ErrorKind::kValidation,
             "cannot stratify: class " + std::to_string(c) + " has " +
                 std::to_string(by_class[c].size()) +
                 " items, needs at least one on each side");
      }
      std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
      for (std::size_t i = 0; i < take[c]; ++i) in_test[by_class[c][i]] = true;
    }
  }
  IndexSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? split.test : split.train).push_back(i);
  }
  return split;
}

std::pair<ImuDataset, ImuDataset> TrainTestSplit(const ImuDataset& dataset,
                                                 const SplitSpec& spec) {
  const auto labels = dataset.Labels();
  const auto split = SplitIndices(labels, spec);
  return {dataset.Select(split.train), dataset.Select(split.test)};
}

std::pair<WindowSet, WindowSet> TrainTestSplit(const WindowSet& windows,
                                               const SplitSpec& spec) {
  const auto split = SplitIndices(windows.labels, spec);
  return {windows.Select(split.train), windows.Select(split.test)};
}

std::vector<Fold> KFoldIndices(std::size_t n, std::size_t k,
                               std::optional<std::span<const int>> labels,
                               std::uint64_t seed) {
  if (k < 2) Fail(ErrorKind::kArgument, "k-fold needs k >= 2");
  if (k > n) {
    Fail(ErrorKind::kArgument, "k-fold: k=" + std::to_string(k) +
                                   " exceeds n=" + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order;
  order.reserve(n);
  if (labels) {
    if (labels->size() != n) {
      Fail(ErrorKind::kArgument, "k-fold: label count differs from n");
    }
    CheckBinary(*labels, "stratified k-fold");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[(*labels)[i]].push_back(i);
    for (auto& members : by_class) {
      std::shuffle(members.begin(), members.end(), rng);
      order.insert(order.end(), members.begin(), members.end());
    }
  } else {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::size_t> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % k;

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

UserPartition PartitionByUser(const ImuDataset& dataset,
                              std::size_t min_samples) {
  if (min_samples < 1) {
    Fail(ErrorKind::kArgument, "min_samples must be positive");
  }
  std::map<int, ImuDataset> grouped;
  for (const auto& s : dataset.samples) {
    auto& part = grouped[s.user_id];
    part.samples.push_back(s);
  }
  UserPartition out;
  for (auto& [user, part] : grouped) {
    if (part.size() >= min_samples) {
      part.provenance = dataset.provenance;
      out.users.emplace(user, std::move(part));
    } else {
      out.excluded[user] = part.size();
    }
  }
  if (out.users.empty()) {
    Fail(ErrorKind::kValidation,
         "no user has at least " + std::to_string(min_samples) + " samples");
  }
  return out;
}

namespace {

// Splits `total` into `parts` non-negative integers of random relative size.
std::vector<std::size_t> RandomComposition(std::size_t total,
                                           std::size_t parts,
                                           std::mt19937_64& rng) {
  std::vector<std::size_t> out(parts, 0);
  if (parts == 0) return out;
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::vector<double> w(parts);
  for (auto& x : w) x = weight(rng);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    out[i] = static_cast<std::size_t>(
        std::floor(static_cast<double>(total) * w[i] / sum));
    assigned += out[i];
  }
  for (std::size_t i = 0; assigned < total; i = (i + 1) % parts) {
    ++out[i];
    ++assigned;
  }
  return out;
}

}  // namespace

ImuDataset GenerateSynthetic(const SyntheticConfig& config) {
  if (config.users < 1 || config.samples_per_user < 1) {
    Fail(ErrorKind::kArgument, "synthetic: counts must be positive");
  }
  if (!(config.positive_ratio >= 0.0 && config.positive_ratio <= 1.0)) {
    Fail(ErrorKind::kArgument, "synthetic: positive_ratio must be in [0,1]");
  }
  if (!(config.sample_rate_hz > 0.0)) {
    Fail(ErrorKind::kArgument, "synthetic: sample rate must be positive");
  }
  constexpr std::array<double, kNumChannels> kSigma = {0.1, 0.1, 0.1,
                                                       10.0, 10.0, 10.0};
  constexpr std::array<double, kNumChannels> kMean = {0.0, -0.2, 0.9,
                                                      0.0, -20.0, 20.0};
  constexpr std::array<double, kNumChannels> kDirection = {1, -1, 1, -1, 1, 1};
  constexpr double kEpisodeMean = 192.0;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  ImuDataset out;
  out.provenance = "synthetic(seed=" + std::to_string(config.seed) + ")";
  const auto n = static_cast<std::size_t>(config.samples_per_user);
  for (int user = 1; user <= config.users; ++user) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(user)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);

    std::array<double, kNumChannels> mean{}, shift{}, gait_phase{},
        tremor_phase{};
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      mean[c] = kMean[c] + config.user_heterogeneity * kSigma[c] * normal(rng);
      const double gain = 1.0 + config.user_heterogeneity * normal(rng);
      shift[c] = config.separation * kSigma[c] * kDirection[c] * gain;
      gait_phase[c] = phase_dist(rng);
      tremor_phase[c] = phase_dist(rng);
    }

    // Alternating walk / freeze segments with an exact positive count.
    const auto positives = static_cast<std::size_t>(
        std::llround(config.positive_ratio * static_cast<double>(n)));
    const std::size_t episodes =
        positives == 0 ? 0
                       : std::max<std::size_t>(
                             1, static_cast<std::size_t>(std::llround(
                                    static_cast<double>(positives) /
                                    kEpisodeMean)));
    const auto episode_len = RandomComposition(positives, episodes, rng);
    const auto walk_len = RandomComposition(n - positives, episodes + 1, rng);
    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t e = 0; e <= episodes; ++e) {
      labels.insert(labels.end(), walk_len[e], 0);
      if (e < episodes) labels.insert(labels.end(), episode_len[e], 1);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / config.sample_rate_hz;
      const bool freezing = labels[i] == 1;
      std::array<double, kNumChannels> v{};
      for (std::size_t c = 0; c < kNumChannels; ++c) {
        const double oscillation =
            freezing ? 0.5 * kSigma[c] * std::sin(kTwoPi * 6.0 * t +
                                                  tremor_phase[c])
                     : 0.5 * kSigma[c] * std::sin(kTwoPi * 1.0 * t +
                                                  gait_phase[c]);
        const double noise = (freezing ? 1.5 : 1.0) * kSigma[c] * normal(rng);
        v[c] = mean[c] + (freezing ? shift[c] : 0.0) + oscillation + noise;
      }
      out.samples.push_back(ImuSample{t, v[0], v[1], v[2], v[3], v[4], v[5],
                                      labels[i], user});
    }
  }
  return out;
}

}  // namespace foglab::data
