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

#ifndef FOGLAB_NN_H_
#define FOGLAB_NN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "foglab/data.h"

// Small sequence-classifier kit: 1-D convolution, LSTM, dense and dropout
// layers with hand-written forward and backward passes, binary
// cross-entropy, L2 weight decay and Adam. Everything runs in double
// precision on the CPU.
namespace foglab::nn {

enum class LayerKind { kConv1d, kLstm, kDense, kDropout };
enum class Activation { kLinear, kRelu, kSigmoid };

std::string_view ActivationName(Activation activation);
std::optional<Activation> ParseActivation(std::string_view name);

struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t filters = 0;      // conv1d
  std::size_t kernel_size = 0;  // conv1d
  std::size_t stride = 1;       // conv1d
  std::size_t units = 0;        // lstm, dense
  Activation activation = Activation::kLinear;  // conv1d, dense
  double rate = 0.0;            // dropout

  static LayerSpec Conv1d(std::size_t filters, std::size_t kernel_size,
                          std::size_t stride = 1,
                          Activation activation = Activation::kRelu);
  static LayerSpec Lstm(std::size_t units);
  static LayerSpec Dense(std::size_t units, Activation activation);
  static LayerSpec Dropout(double rate);

  bool operator==(const LayerSpec&) const = default;
};

struct InputShape {
  std::size_t window_len = 0;
  std::size_t channels = 0;
  bool operator==(const InputShape&) const = default;
};

// Layer chain plus the input it consumes. Sequence layers (conv1d) map
// (time, channels) to (time', filters); lstm maps a sequence to its final
// hidden state; dense flattens a sequence input in time-major order.
struct Architecture {
  std::vector<LayerSpec> layers;
  InputShape input;

  // Throws kSpec when shapes do not compose or the chain does not end in
  // dense(1, sigmoid).
  void Validate() const;
  bool operator==(const Architecture&) const = default;
};

// conv1d(64, kernel 3, stride 1, relu) -> lstm(64) -> dropout(0.3) ->
// dense(1, sigmoid).
Architecture DefaultArchitecture(InputShape input);

// One named trainable array, values in row-major order.
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
  // Kernels take part in L2 decay; biases do not.
  bool decayed = false;

  bool operator==(const Param&) const = default;
};

// Every trainable parameter of an architecture in canonical order: layers in
// chain order; per layer kernel, recurrent kernel (lstm), bias.
struct ModelWeights {
  std::vector<Param> params;

  std::size_t ParameterCount() const;
  bool SameLayout(const ModelWeights& other) const;
  const Param* Find(std::string_view name) const;
  Param* Find(std::string_view name);
  bool AllFinite() const;
  // A zero-filled copy with the same layout.
  ModelWeights ZerosLike() const;

  bool operator==(const ModelWeights&) const = default;
};

// Glorot-uniform kernels (limit sqrt(6 / (fan_in + fan_out))), zero biases,
// lstm forget-gate bias 1.
ModelWeights InitWeights(const Architecture& arch, std::uint64_t seed);

// Inputs for one forward pass: n windows of window_len x channels values,
// row-major.
struct Batch {
  std::size_t n = 0;
  std::size_t window_len = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  static Batch FromWindows(const data::WindowSet& windows);
  static Batch FromWindows(const data::WindowSet& windows,
                           std::span<const std::size_t> index);
};

enum class Mode { kTrain, kInfer };

// Intermediate values of a forward pass kept for Backward(). Opaque.
struct ForwardCache;

struct ForwardResult {
  std::vector<double> probs;
  std::vector<double> logits;
  std::shared_ptr<const ForwardCache> cache;
};

// Dropout masks are drawn from `dropout_seed` in train mode only (inverted
// scaling); infer mode is deterministic.
ForwardResult Forward(const ModelWeights& weights, const Architecture& arch,
                      const Batch& batch, Mode mode,
                      std::uint64_t dropout_seed = 0);

// Mean binary cross-entropy plus l2_lambda * sum of squared kernel entries.
// Probabilities are clamped to [1e-12, 1 - 1e-12] before the logarithm.
double LossBce(std::span<const double> probs, std::span<const int> labels,
               const ModelWeights& weights, double l2_lambda);

// Gradient of LossBce with respect to every parameter, same layout as the
// weights used in the forward pass that produced `forward`.
ModelWeights Backward(const ForwardResult& forward, std::span<const int> labels,
                      double l2_lambda);

struct AdamState {
  ModelWeights m;
  ModelWeights v;
  std::size_t step = 0;

  static AdamState For(const ModelWeights& weights);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

// Advances state.step, then applies one bias-corrected Adam update in place.
void AdamStep(ModelWeights& weights, const ModelWeights& gradients,
              AdamState& state, double learning_rate);

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  double l2_lambda = 0.0;
  // Epochs without validation improvement before stopping; 0 disables.
  std::size_t patience = 5;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct FitResult {
  ModelWeights weights;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran.
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
};

// Mini-batch Adam training with a seeded per-epoch shuffle. A stratified
// validation_fraction slice is held out for early stopping and the
// best-validation weights are returned. Training starts from `initial` when
// given, otherwise from InitWeights(arch, config.seed).
FitResult Fit(const data::WindowSet& train, const TrainConfig& config,
              const Architecture& arch,
              const ModelWeights* initial = nullptr);

std::vector<double> Predict(const ModelWeights& weights,
                            const Architecture& arch, const Batch& batch);

// 1 when p > 0.5, else 0.
std::vector<int> HardLabels(std::span<const double> probs);

// Versioned text container: architecture, then (name, shape, values)
// records. Values are written in shortest round-trip form, so a save/load
// cycle is bit-exact.
std::string FormatWeights(const Architecture& arch,
                          const ModelWeights& weights);
void ParseWeights(std::string_view text, Architecture* arch,
                  ModelWeights* weights);
void SaveWeights(const std::filesystem::path& path, const Architecture& arch,
                 const ModelWeights& weights);
void LoadWeights(const std::filesystem::path& path, Architecture* arch,
                 ModelWeights* weights);

}  // namespace foglab::nn

#endif  // FOGLAB_NN_H_
