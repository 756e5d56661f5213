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

#ifndef FOGLAB_FED_H_
#define FOGLAB_FED_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foglab/data.h"
#include "foglab/eval.h"
#include "foglab/nn.h"

namespace foglab::fed {

// What a client sends to the server after local training. Raw windows never
// leave the client.
struct ClientUpdate {
  int user_id = 0;
  nn::ModelWeights weights;
  std::size_t n_k = 0;  // local training windows
  std::size_t epochs_run = 0;
  eval::MetricsReport metrics;  // local model on the local held-out split
};

// Sample-weighted average sum_k (n_k / n) w_k. Clients are folded in
// ascending user_id order so the result does not depend on list order.
nn::ModelWeights FederatedAverage(std::span<const ClientUpdate> updates);

// Per-channel moment sums. Clients share these instead of data so the server
// can form one global standardization.
struct ChannelMoments {
  std::size_t count = 0;
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

struct ChannelScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  void Apply(data::WindowSet& windows) const;
};

ChannelMoments Moments(const data::WindowSet& windows);
ChannelScaler CombineMoments(std::span<const ChannelMoments> parts);

struct FedConfig {
  std::size_t rounds = 10;
  std::size_t min_samples_per_user = 20;
  std::size_t window_len = 32;
  std::size_t stride = 16;
  data::LabelRule label_rule = data::LabelRule::kMajority;
  // Stratified share of every user's windows pooled into the global test set.
  double global_test_fraction = 0.2;
  // Stratified share of each client's remaining windows kept for local
  // evaluation.
  double local_test_fraction = 0.2;
  double balance_ratio = 1.0;
  std::size_t units = 64;
  std::size_t filters = 64;
  std::size_t kernel_size = 3;
  double dropout = 0.3;
  nn::TrainConfig local;  // lr 0.001, batch 32 by default
  std::uint64_t seed = 42;

  FedConfig() { local.max_epochs = 50; local.patience = 5; }
  void Validate() const;
  nn::Architecture Arch() const;
};

class Client {
 public:
  // `train` and `test` are this user's local splits.
  Client(int user_id, data::WindowSet train, data::WindowSet test);

  int user_id() const { return user_id_; }
  std::size_t n_k() const { return train_.size(); }
  std::size_t local_test_size() const { return test_.size(); }
  ChannelMoments TrainMoments() const { return Moments(train_); }
  void Standardize(const ChannelScaler& scaler);

  // Local training from the broadcast weights. Returns nothing and sets
  // `skip_reason` when the local data cannot be trained on.
  std::optional<ClientUpdate> Train(const nn::ModelWeights& global,
                                    const nn::Architecture& arch,
                                    const nn::TrainConfig& config,
                                    std::string* skip_reason) const;

 private:
  int user_id_;
  data::WindowSet train_;
  data::WindowSet test_;
};

struct Federation {
  std::vector<Client> clients;  // ascending user_id
  data::WindowSet test;         // pooled global holdout
  std::map<int, std::size_t> excluded;  // user -> sample count
  std::vector<std::string> notes;
  ChannelScaler scaler;
};

// Partition by user, window, carve the global test share, balance and split
// each client locally, then standardize everything with the scaler built from
// the clients' training moments.
Federation Prepare(const data::ImuDataset& dataset, const FedConfig& config);

struct ClientRecord {
  int user_id = 0;
  std::size_t n_k = 0;
  std::size_t epochs_run = 0;
  eval::MetricsReport metrics;
};

struct RoundLog {
  std::size_t round = 0;  // 1-based
  std::vector<ClientRecord> clients;
  std::vector<std::pair<int, std::string>> skipped;
  eval::MetricsReport global;
  double global_loss = 0.0;
  double seconds = 0.0;  // wall clock; kept out of data files
};

struct FedResult {
  nn::Architecture arch;
  nn::ModelWeights global;
  std::vector<RoundLog> rounds;
};

// Seed of `user_id`'s local training in `round` (1-based).
std::uint64_t LocalTrainSeed(std::uint64_t seed, std::size_t round,
                             int user_id);

using RoundCallback =
    std::function<void(const RoundLog&, const nn::ModelWeights&)>;

// Seeded global init, then per round: broadcast, local training, FedAvg and
// evaluation on `test`.
FedResult RunRounds(const std::vector<Client>& clients,
                    const data::WindowSet& test, const FedConfig& config,
                    const RoundCallback& on_round = nullptr);

struct UserRow {
  int user_id = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;
  std::size_t epochs = 0;
  std::size_t samples = 0;
};

struct UserSummary {
  std::vector<UserRow> users;  // last round
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
  double avg_epochs = 0.0;  // over every (user, round) entry

  std::string UsersCsv() const;
  std::string ToKeyValue() const;
};

UserSummary SummarizeUsers(std::span<const RoundLog> rounds);

// round,accuracy,precision,recall,f1,auc,loss
std::string TrendCsv(std::span<const RoundLog> rounds);
// One JSON object per line, wall-clock time excluded.
std::string RoundRecord(const RoundLog& log);

}  // namespace foglab::fed

#endif  // FOGLAB_FED_H_
