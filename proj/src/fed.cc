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

#include "foglab/fed.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "foglab/error.h"
#include "foglab/text_io.h"

namespace foglab::fed {

namespace {

// splitmix64 finalizer; derives independent seeds from (seed, a, b).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed;
  for (std::uint64_t v : {a, b}) {
    z += 0x9E3779B97F4A7C15ull + v;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
  }
  return z;
}

constexpr std::uint64_t kCarveTag = 1;
constexpr std::uint64_t kBalanceTag = 2;
constexpr std::uint64_t kLocalSplitTag = 3;
constexpr std::uint64_t kTrainTag = 4;

bool HasBothClasses(const data::WindowSet& w) {
  return w.CountLabel(0) > 0 && w.CountLabel(1) > 0;
}

// Stratified when both classes allow it, otherwise a plain shuffle split.
data::IndexSplit SplitWithFallback(const data::WindowSet& w, double fraction,
                                   std::uint64_t seed, bool* stratified) {
  data::SplitSpec spec{fraction, seed, true};
  try {
    *stratified = true;
    return data::SplitIndices(w.labels, spec);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kValidation) throw;
  }
  *stratified = false;
  spec.stratified = false;
  return data::SplitIndices(w.labels, spec);
}

eval::MetricsReport Evaluate(const nn::ModelWeights& weights,
                             const nn::Architecture& arch,
                             const data::WindowSet& windows,
                             std::vector<double>* probs_out = nullptr) {
  const auto probs =
      nn::Predict(weights, arch, nn::Batch::FromWindows(windows));
  std::optional<std::span<const double>> scores;
  if (HasBothClasses(windows)) scores = probs;
  auto report =
      eval::ClassificationReport(eval::HardLabels(probs), windows.labels, scores);
  if (probs_out) *probs_out = probs;
  return report;
}

}  // namespace

nn::ModelWeights FederatedAverage(std::span<const ClientUpdate> updates) {
  if (updates.empty()) {
    Fail(ErrorKind::kArgument, "federated average of zero clients");
  }
  std::vector<std::size_t> order(updates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return updates[a].user_id < updates[b].user_id;
  });
  const nn::ModelWeights& first = updates[order.front()].weights;
  double n = 0.0;
  for (const auto& u : updates) {
    if (u.n_k == 0) {
      Fail(ErrorKind::kArgument,
           "client " + std::to_string(u.user_id) + " reported n_k = 0");
    }
    if (!u.weights.SameLayout(first)) {
      Fail(ErrorKind::kAggregation,
           "client " + std::to_string(u.user_id) +
               " sent weights with a different layout");
    }
    n += static_cast<double>(u.n_k);
  }
  nn::ModelWeights out = first.ZerosLike();
  for (std::size_t k : order) {
    const double share = static_cast<double>(updates[k].n_k) / n;
    for (std::size_t p = 0; p < out.params.size(); ++p) {
      auto& dst = out.params[p].values;
      const auto& src = updates[k].weights.params[p].values;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += share * src[i];
    }
  }
  return out;
}

ChannelMoments Moments(const data::WindowSet& windows) {
  ChannelMoments m;
  m.sum.assign(windows.channels, 0.0);
  m.sum_sq.assign(windows.channels, 0.0);
  for (std::size_t i = 0; i < windows.values.size(); ++i) {
    const double v = windows.values[i];
    m.sum[i % windows.channels] += v;
    m.sum_sq[i % windows.channels] += v * v;
  }
  m.count = windows.size() * windows.window_len;
  return m;
}

ChannelScaler CombineMoments(std::span<const ChannelMoments> parts) {
  if (parts.empty()) Fail(ErrorKind::kArgument, "no moments to combine");
  const std::size_t c = parts.front().sum.size();
  std::size_t count = 0;
  std::vector<double> sum(c, 0.0), sum_sq(c, 0.0);
  for (const auto& p : parts) {
    if (p.sum.size() != c || p.sum_sq.size() != c) {
      Fail(ErrorKind::kAggregation, "channel moments have different widths");
    }
    count += p.count;
    for (std::size_t j = 0; j < c; ++j) {
      sum[j] += p.sum[j];
      sum_sq[j] += p.sum_sq[j];
    }
  }
  if (count == 0) Fail(ErrorKind::kArgument, "no samples behind the moments");
  ChannelScaler s;
  for (std::size_t j = 0; j < c; ++j) {
    const double mean = sum[j] / count;
    const double var = std::max(0.0, sum_sq[j] / count - mean * mean);
    s.mean.push_back(mean);
    s.scale.push_back(var > 0.0 ? std::sqrt(var) : 1.0);
  }
  return s;
}

void ChannelScaler::Apply(data::WindowSet& windows) const {
  if (mean.size() != windows.channels) {
    Fail(ErrorKind::kArgument, "scaler channel count differs from windows");
  }
  for (std::size_t i = 0; i < windows.values.size(); ++i) {
    const std::size_t j = i % windows.channels;
    windows.values[i] = (windows.values[i] - mean[j]) / scale[j];
  }
}

void FedConfig::Validate() const {
  if (rounds < 1) Fail(ErrorKind::kArgument, "rounds must be >= 1");
  if (window_len < 1 || stride < 1) {
    Fail(ErrorKind::kArgument, "window_len and stride must be >= 1");
  }
  for (double f : {global_test_fraction, local_test_fraction}) {
    if (!(f > 0.0 && f < 1.0)) {
      Fail(ErrorKind::kArgument, "test fractions must lie in (0, 1)");
    }
  }
  if (!(balance_ratio >= 1.0)) {
    Fail(ErrorKind::kArgument, "balance_ratio must be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    Fail(ErrorKind::kArgument, "dropout must lie in [0, 1)");
  }
  local.Validate();
  Arch().Validate();
}

nn::Architecture FedConfig::Arch() const {
  return nn::Architecture{
      {nn::LayerSpec::Conv1d(filters, kernel_size, 1, nn::Activation::kRelu),
       nn::LayerSpec::Lstm(units), nn::LayerSpec::Dropout(dropout),
       nn::LayerSpec::Dense(1, nn::Activation::kSigmoid)},
      {window_len, data::kNumChannels}};
}

Client::Client(int user_id, data::WindowSet train, data::WindowSet test)
    : user_id_(user_id), train_(std::move(train)), test_(std::move(test)) {}

void Client::Standardize(const ChannelScaler& scaler) {
  scaler.Apply(train_);
  scaler.Apply(test_);
}

std::optional<ClientUpdate> Client::Train(const nn::ModelWeights& global,
                                          const nn::Architecture& arch,
                                          const nn::TrainConfig& config,
                                          std::string* skip_reason) const {
  if (!HasBothClasses(train_)) {
    if (skip_reason) {
      *skip_reason = "single-class local training data (" +
                     std::to_string(train_.CountLabel(0)) + " negative, " +
                     std::to_string(train_.CountLabel(1)) + " positive)";
    }
    return std::nullopt;
  }
  const nn::FitResult fit = nn::Fit(train_, config, arch, &global);
  ClientUpdate update;
  update.user_id = user_id_;
  update.weights = fit.weights;
  update.n_k = train_.size();
  update.epochs_run = fit.epochs_run;
  update.metrics = Evaluate(fit.weights, arch, test_);
  return update;
}

Federation Prepare(const data::ImuDataset& dataset, const FedConfig& config) {
  config.Validate();
  const data::UserPartition part =
      data::PartitionByUser(dataset, config.min_samples_per_user);
  Federation fed;
  fed.excluded = part.excluded;
  for (const auto& [user, count] : part.excluded) {
    fed.notes.push_back("user " + std::to_string(user) + " excluded: " +
                        std::to_string(count) + " samples < " +
                        std::to_string(config.min_samples_per_user));
  }
  bool have_test = false;
  for (const auto& [user, ds] : part.users) {
    const std::string who = "user " + std::to_string(user);
    if (data::WindowCount(ds.samples.size(), config.window_len,
                          config.stride) < 2) {
      fed.excluded[user] = ds.samples.size();
      fed.notes.push_back(who + " excluded: too short for two windows");
      continue;
    }
    const data::WindowSet windows = data::MakeWindows(
        ds, config.window_len, config.stride, config.label_rule);
    bool stratified = true;
    const auto carve =
        SplitWithFallback(windows, config.global_test_fraction,
                          DeriveSeed(config.seed, kCarveTag, user), &stratified);
    if (!stratified) fed.notes.push_back(who + ": unstratified test carve");
    const data::WindowSet held = windows.Select(carve.test);
    if (!have_test) {
      fed.test = held;
      have_test = true;
    } else {
      fed.test.Append(held);
    }
    data::WindowSet local = windows.Select(carve.train);
    if (HasBothClasses(local)) {
      local = local.Select(data::BalanceIndices(
          local.labels, config.balance_ratio,
          DeriveSeed(config.seed, kBalanceTag, user)));
    } else {
      fed.notes.push_back(who + ": single-class local data, not balanced");
    }
    if (local.size() < 2) {
      fed.excluded[user] = ds.samples.size();
      fed.notes.push_back(who + " excluded: fewer than two local windows");
      continue;
    }
    const auto split = SplitWithFallback(
        local, config.local_test_fraction,
        DeriveSeed(config.seed, kLocalSplitTag, user), &stratified);
    if (!stratified) fed.notes.push_back(who + ": unstratified local split");
    data::WindowSet train = local.Select(split.train);
    if (train.size() < config.min_samples_per_user) {
      fed.excluded[user] = ds.samples.size();
      fed.notes.push_back(who + " excluded: " + std::to_string(train.size()) +
                          " local training windows < " +
                          std::to_string(config.min_samples_per_user));
      continue;
    }
    fed.clients.emplace_back(user, std::move(train), local.Select(split.test));
  }
  if (fed.clients.empty()) {
    Fail(ErrorKind::kValidation, "no user qualifies as a federated client");
  }
  std::vector<ChannelMoments> moments;
  for (const auto& c : fed.clients) moments.push_back(c.TrainMoments());
  fed.scaler = CombineMoments(moments);
  for (auto& c : fed.clients) c.Standardize(fed.scaler);
  fed.scaler.Apply(fed.test);
  return fed;
}

std::uint64_t LocalTrainSeed(std::uint64_t seed, std::size_t round,
                             int user_id) {
  return DeriveSeed(seed, (kTrainTag << 32) + round,
                    static_cast<std::uint64_t>(user_id));
}

FedResult RunRounds(const std::vector<Client>& clients,
                    const data::WindowSet& test, const FedConfig& config,
                    const RoundCallback& on_round) {
  config.Validate();
  if (clients.empty()) Fail(ErrorKind::kArgument, "no federated clients");
  if (test.size() == 0) Fail(ErrorKind::kArgument, "empty global test set");
  FedResult result;
  result.arch = config.Arch();
  result.global = nn::InitWeights(result.arch, config.seed);
  for (std::size_t r = 1; r <= config.rounds; ++r) {
    const auto start = std::chrono::steady_clock::now();
    RoundLog log;
    log.round = r;
    std::vector<ClientUpdate> updates;
    for (const Client& client : clients) {
      nn::TrainConfig local = config.local;
      local.seed = LocalTrainSeed(config.seed, r, client.user_id());
      std::string reason;
      auto update = client.Train(result.global, result.arch, local, &reason);
      if (!update) {
        log.skipped.emplace_back(client.user_id(), reason);
        continue;
      }
      log.clients.push_back(
          {update->user_id, update->n_k, update->epochs_run, update->metrics});
      updates.push_back(std::move(*update));
    }
    if (updates.empty()) {
      std::string why;
      for (const auto& [user, reason] : log.skipped) {
        why += " user " + std::to_string(user) + ": " + reason + ";";
      }
      Fail(ErrorKind::kValidation, "round " + std::to_string(r) +
                                       ": every client was skipped;" + why);
    }
    result.global = FederatedAverage(updates);
    if (!result.global.AllFinite()) {
      Fail(ErrorKind::kNumeric, "global weights became non-finite");
    }
    std::vector<double> probs;
    log.global = Evaluate(result.global, result.arch, test, &probs);
    log.global_loss = nn::LossBce(probs, test.labels, result.global, 0.0);
    log.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (on_round) on_round(log, result.global);
    result.rounds.push_back(std::move(log));
  }
  return result;
}

UserSummary SummarizeUsers(std::span<const RoundLog> rounds) {
  if (rounds.empty()) Fail(ErrorKind::kArgument, "no completed rounds");
  UserSummary s;
  std::vector<double> acc, f1;
  for (const auto& c : rounds.back().clients) {
    UserRow row;
    row.user_id = c.user_id;
    row.accuracy = c.metrics.accuracy;
    row.precision = c.metrics.per_class[1].precision;
    row.recall = c.metrics.per_class[1].recall;
    row.f1 = c.metrics.per_class[1].f1;
    row.auc = c.metrics.auc;
    row.epochs = c.epochs_run;
    row.samples = c.n_k;
    acc.push_back(row.accuracy);
    f1.push_back(row.f1);
    s.users.push_back(row);
  }
  if (s.users.empty()) Fail(ErrorKind::kArgument, "last round has no clients");
  const auto a = eval::AggregateFolds(acc);
  const auto f = eval::AggregateFolds(f1);
  s.mean_accuracy = a.mean;
  s.std_accuracy = a.std;
  s.mean_f1 = f.mean;
  s.std_f1 = f.std;
  double epochs = 0.0;
  std::size_t entries = 0;
  for (const auto& r : rounds) {
    for (const auto& c : r.clients) {
      epochs += static_cast<double>(c.epochs_run);
      ++entries;
    }
  }
  s.avg_epochs = epochs / static_cast<double>(entries);
  return s;
}

std::string UserSummary::UsersCsv() const {
  std::ostringstream out;
  out << "user,accuracy,precision,recall,f1,auc,epochs,samples\n";
  for (const auto& u : users) {
    out << u.user_id << "," << FormatDouble(u.accuracy) << ","
        << FormatDouble(u.precision) << "," << FormatDouble(u.recall) << ","
        << FormatDouble(u.f1) << "," << (u.auc ? FormatDouble(*u.auc) : "")
        << "," << u.epochs << "," << u.samples << "\n";
  }
  return out.str();
}

std::string UserSummary::ToKeyValue() const {
  std::ostringstream out;
  out << "format = foglab-user-summary/1\n";
  out << "users = " << users.size() << "\n";
  out << "mean_accuracy = " << FormatDouble(mean_accuracy) << "\n";
  out << "std_accuracy = " << FormatDouble(std_accuracy) << "\n";
  out << "mean_f1 = " << FormatDouble(mean_f1) << "\n";
  out << "std_f1 = " << FormatDouble(std_f1) << "\n";
  out << "avg_epochs = " << FormatDouble(avg_epochs) << "\n";
  return out.str();
}

std::string TrendCsv(std::span<const RoundLog> rounds) {
  std::ostringstream out;
  out << "round,accuracy,precision,recall,f1,auc,loss\n";
  for (const auto& r : rounds) {
    const auto& g = r.global;
    out << r.round << "," << FormatDouble(g.accuracy) << ","
        << FormatDouble(g.per_class[1].precision) << ","
        << FormatDouble(g.per_class[1].recall) << ","
        << FormatDouble(g.per_class[1].f1) << ","
        << (g.auc ? FormatDouble(*g.auc) : "") << ","
        << FormatDouble(r.global_loss) << "\n";
  }
  return out.str();
}

std::string RoundRecord(const RoundLog& log) {
  auto metrics = [](const eval::MetricsReport& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.per_class[1].precision;
    j["recall"] = m.per_class[1].recall;
    j["f1"] = m.per_class[1].f1;
    j["auc"] = m.auc ? nlohmann::ordered_json(*m.auc) : nlohmann::ordered_json();
    j["samples"] = m.cm.Total();
    return j;
  };
  nlohmann::ordered_json j;
  j["round"] = log.round;
  j["clients"] = nlohmann::ordered_json::array();
  for (const auto& c : log.clients) {
    nlohmann::ordered_json cj;
    cj["user_id"] = c.user_id;
    cj["n_k"] = c.n_k;
    cj["epochs_run"] = c.epochs_run;
    cj["local"] = metrics(c.metrics);
    j["clients"].push_back(cj);
  }
  j["skipped"] = nlohmann::ordered_json::array();
  for (const auto& [user, reason] : log.skipped) {
    j["skipped"].push_back({{"user_id", user}, {"reason", reason}});
  }
  j["global"] = metrics(log.global);
  j["global"]["loss"] = log.global_loss;
  return j.dump() + "\n";
}

}  // namespace foglab::fed
