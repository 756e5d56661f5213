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

#include "foglab/nn.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "foglab/error.h"

namespace foglab::nn {

namespace {

using Mat = Eigen::MatrixXd;
using RowMajorMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajorMat>;
using MutMap = Eigen::Map<RowMajorMat>;
using ConstRowMap = Eigen::Map<const Eigen::RowVectorXd>;
using MutRowMap = Eigen::Map<Eigen::RowVectorXd>;

constexpr double kProbClamp = 1e-12;

// Output shape of a layer: a sequence (steps x width) or a flat vector.
struct Shape {
  bool sequence = true;
  std::size_t steps = 0;
  std::size_t width = 0;
  std::size_t Flat() const { return sequence ? steps * width : width; }
};

std::string LayerPrefix(std::size_t index, const LayerSpec& spec) {
  static constexpr const char* kNames[] = {"conv1d", "lstm", "dense",
                                           "dropout"};
  return "layer" + std::to_string(index) + "." +
         kNames[static_cast<int>(spec.kind)];
}

std::vector<Shape> ResolveShapes(const Architecture& arch) {
  if (arch.input.window_len == 0 || arch.input.channels == 0) {
    Fail(ErrorKind::kSpec, "input shape must be positive");
  }
  if (arch.layers.empty()) Fail(ErrorKind::kSpec, "empty layer list");
  std::vector<Shape> shapes;
  Shape shape{true, arch.input.window_len, arch.input.channels};
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& layer = arch.layers[i];
    const std::string where = LayerPrefix(i, layer) + ": ";
    switch (layer.kind) {
      case LayerKind::kConv1d:
        if (!shape.sequence) {
          Fail(ErrorKind::kSpec, where + "conv1d needs a sequence input");
        }
        if (layer.filters == 0 || layer.kernel_size == 0 || layer.stride == 0) {
          Fail(ErrorKind::kSpec, where + "sizes must be positive");
        }
        if (layer.kernel_size > shape.steps) {
          Fail(ErrorKind::kSpec, where + "kernel longer than input sequence");
        }
        shape = {true, (shape.steps - layer.kernel_size) / layer.stride + 1,
                 layer.filters};
        break;
      case LayerKind::kLstm:
        if (!shape.sequence) {
          Fail(ErrorKind::kSpec, where + "lstm needs a sequence input");
        }
        if (layer.units == 0) Fail(ErrorKind::kSpec, where + "zero units");
        shape = {false, 0, layer.units};
        break;
      case LayerKind::kDense:
        if (layer.units == 0) Fail(ErrorKind::kSpec, where + "zero units");
        shape = {false, 0, layer.units};
        break;
      case LayerKind::kDropout:
        if (!(layer.rate >= 0.0 && layer.rate < 1.0)) {
          Fail(ErrorKind::kSpec, where + "dropout rate must be in [0, 1)");
        }
        break;
    }
    shapes.push_back(shape);
  }
  const LayerSpec& last = arch.layers.back();
  if (last.kind != LayerKind::kDense || last.units != 1 ||
      last.activation != Activation::kSigmoid) {
    Fail(ErrorKind::kSpec, "network must end with dense(1, sigmoid)");
  }
  return shapes;
}

double SafeSigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Mat SigmoidOf(const Mat& z) { return z.unaryExpr(&SafeSigmoid); }

Mat Activate(const Mat& z, Activation activation) {
  switch (activation) {
    case Activation::kLinear: return z;
    case Activation::kRelu: return z.cwiseMax(0.0);
    case Activation::kSigmoid: return SigmoidOf(z);
  }
  return z;
}

// d activation / d z evaluated at pre-activation z, times upstream grad.
Mat ActivationBackward(const Mat& z, const Mat& upstream,
                       Activation activation) {
  switch (activation) {
    case Activation::kLinear: return upstream;
    case Activation::kRelu:
      return upstream.cwiseProduct(
          z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    case Activation::kSigmoid: {
      const Mat s = SigmoidOf(z);
      return upstream.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
    }
  }
  return upstream;
}

// Activations flowing between layers: `steps` holds one n x width matrix per
// time step for sequences, a single n x width matrix for vectors.
struct Tensor {
  bool sequence = true;
  std::vector<Mat> steps;
};

Mat Flatten(const Tensor& t) {
  if (!t.sequence) return t.steps.front();
  const Eigen::Index rows = t.steps.front().rows();
  const Eigen::Index width = t.steps.front().cols();
  Mat out(rows, width * static_cast<Eigen::Index>(t.steps.size()));
  for (std::size_t s = 0; s < t.steps.size(); ++s) {
    out.middleCols(static_cast<Eigen::Index>(s) * width, width) = t.steps[s];
  }
  return out;
}

Tensor Unflatten(const Mat& flat, std::size_t steps) {
  Tensor t;
  const Eigen::Index width = flat.cols() / static_cast<Eigen::Index>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    t.steps.push_back(
        flat.middleCols(static_cast<Eigen::Index>(s) * width, width));
  }
  return t;
}

}  // namespace

struct LayerCache {
  Tensor input;
  Mat flat_input;            // dense
  std::vector<Mat> pre;      // conv per output step; dense single entry
  std::vector<Mat> gates;    // lstm: i f g o activations per step
  std::vector<Mat> cells;    // lstm c_t
  std::vector<Mat> hidden;   // lstm h_t
  std::vector<Mat> mask;     // dropout, empty when inactive
  std::size_t first_param = 0;
};

struct ForwardCache {
  ModelWeights weights;
  Architecture arch;
  std::vector<Shape> shapes;
  std::vector<LayerCache> layers;
  std::vector<double> probs;
  std::size_t n = 0;
};

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kLinear: return "linear";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "linear";
}

std::optional<Activation> ParseActivation(std::string_view name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  return std::nullopt;
}

LayerSpec LayerSpec::Conv1d(std::size_t filters, std::size_t kernel_size,
                            std::size_t stride, Activation activation) {
  LayerSpec s;
  s.kind = LayerKind::kConv1d;
  s.filters = filters;
  s.kernel_size = kernel_size;
  s.stride = stride;
  s.activation = activation;
  return s;
}

LayerSpec LayerSpec::Lstm(std::size_t units) {
  LayerSpec s;
  s.kind = LayerKind::kLstm;
  s.units = units;
  return s;
}

LayerSpec LayerSpec::Dense(std::size_t units, Activation activation) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.units = units;
  s.activation = activation;
  return s;
}

LayerSpec LayerSpec::Dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::kDropout;
  s.rate = rate;
  return s;
}

void Architecture::Validate() const { ResolveShapes(*this); }

Architecture DefaultArchitecture(InputShape input) {
  return Architecture{{LayerSpec::Conv1d(64, 3, 1, Activation::kRelu),
                       LayerSpec::Lstm(64), LayerSpec::Dropout(0.3),
                       LayerSpec::Dense(1, Activation::kSigmoid)},
                      input};
}

std::size_t ModelWeights::ParameterCount() const {
  std::size_t total = 0;
  for (const auto& p : params) total += p.values.size();
  return total;
}

bool ModelWeights::SameLayout(const ModelWeights& other) const {
  if (params.size() != other.params.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != other.params[i].name ||
        params[i].shape != other.params[i].shape ||
        params[i].values.size() != other.params[i].values.size()) {
      return false;
    }
  }
  return true;
}

const Param* ModelWeights::Find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Param* ModelWeights::Find(std::string_view name) {
  for (auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

bool ModelWeights::AllFinite() const {
  for (const auto& p : params) {
    for (double v : p.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ModelWeights ModelWeights::ZerosLike() const {
  ModelWeights out = *this;
  for (auto& p : out.params) std::fill(p.values.begin(), p.values.end(), 0.0);
  return out;
}

ModelWeights InitWeights(const Architecture& arch, std::uint64_t seed) {
  const auto shapes = ResolveShapes(arch);
  std::mt19937_64 rng(seed);
  ModelWeights weights;
  auto glorot = [&](std::string name, std::vector<std::size_t> shape,
                    double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::size_t count = 1;
    for (auto d : shape) count *= d;
    Param p{std::move(name), std::move(shape), std::vector<double>(count),
            true};
    for (auto& v : p.values) v = dist(rng);
    weights.params.push_back(std::move(p));
  };
  auto zeros = [&](std::string name, std::size_t count) {
    weights.params.push_back(
        Param{std::move(name), {count}, std::vector<double>(count, 0.0),
              false});
  };

  Shape in{true, arch.input.window_len, arch.input.channels};
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& layer = arch.layers[i];
    const std::string prefix = LayerPrefix(i, layer);
    switch (layer.kind) {
      case LayerKind::kConv1d: {
        const auto k = layer.kernel_size, c = in.width, f = layer.filters;
        glorot(prefix + ".kernel", {k, c, f}, static_cast<double>(k * c),
               static_cast<double>(k * f));
        zeros(prefix + ".bias", f);
        break;
      }
      case LayerKind::kLstm: {
        const auto c = in.width, h = layer.units;
        glorot(prefix + ".kernel", {c, 4 * h}, static_cast<double>(c),
               static_cast<double>(4 * h));
        glorot(prefix + ".recurrent_kernel", {h, 4 * h},
               static_cast<double>(h), static_cast<double>(4 * h));
        zeros(prefix + ".bias", 4 * h);
        auto& bias = weights.params.back().values;
        std::fill(bias.begin() + static_cast<std::ptrdiff_t>(h),
                  bias.begin() + static_cast<std::ptrdiff_t>(2 * h), 1.0);
        break;
      }
      case LayerKind::kDense: {
        const auto d = in.Flat(), u = layer.units;
        glorot(prefix + ".kernel", {d, u}, static_cast<double>(d),
               static_cast<double>(u));
        zeros(prefix + ".bias", u);
        break;
      }
      case LayerKind::kDropout:
        break;
    }
    in = shapes[i];
  }
  return weights;
}

Batch Batch::FromWindows(const data::WindowSet& windows) {
  Batch b;
  b.n = windows.size();
  b.window_len = windows.window_len;
  b.channels = windows.channels;
  b.values = windows.values;
  return b;
}

Batch Batch::FromWindows(const data::WindowSet& windows,
                         std::span<const std::size_t> index) {
  Batch b;
  b.n = index.size();
  b.window_len = windows.window_len;
  b.channels = windows.channels;
  b.values.reserve(index.size() * windows.WindowValues());
  for (std::size_t i : index) {
    const auto w = windows.Window(i);
    b.values.insert(b.values.end(), w.begin(), w.end());
  }
  return b;
}

ForwardResult Forward(const ModelWeights& weights, const Architecture& arch,
                      const Batch& batch, Mode mode,
                      std::uint64_t dropout_seed) {
  auto cache = std::make_shared<ForwardCache>();
  cache->shapes = ResolveShapes(arch);
  if (batch.window_len != arch.input.window_len ||
      batch.channels != arch.input.channels ||
      batch.values.size() != batch.n * batch.window_len * batch.channels) {
    Fail(ErrorKind::kArgument, "batch shape does not match model input");
  }
  if (batch.n == 0) Fail(ErrorKind::kArgument, "empty batch");
  for (double v : batch.values) {
    if (!std::isfinite(v)) Fail(ErrorKind::kNumeric, "non-finite input");
  }
  cache->weights = weights;
  cache->arch = arch;
  cache->n = batch.n;
  const auto n = static_cast<Eigen::Index>(batch.n);
  const auto channels = static_cast<Eigen::Index>(batch.channels);

  // Sequence input: one n x channels matrix per time step.
  Tensor x;
  x.sequence = true;
  for (std::size_t t = 0; t < batch.window_len; ++t) {
    Mat step(n, channels);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double* src =
          batch.values.data() +
          (static_cast<std::size_t>(r) * batch.window_len + t) * batch.channels;
      for (Eigen::Index c = 0; c < channels; ++c) step(r, c) = src[c];
    }
    x.steps.push_back(std::move(step));
  }

  std::mt19937_64 dropout_rng(dropout_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::size_t param = 0;
  Mat logits;
  for (std::size_t li = 0; li < arch.layers.size(); ++li) {
    const LayerSpec& layer = arch.layers[li];
    LayerCache lc;
    lc.first_param = param;
    lc.input = x;
    Tensor y;
    switch (layer.kind) {
      case LayerKind::kConv1d: {
        const Param& kernel = weights.params.at(param);
        const Param& bias = weights.params.at(param + 1);
        param += 2;
        const auto c = static_cast<Eigen::Index>(kernel.shape[1]);
        const auto f = static_cast<Eigen::Index>(kernel.shape[2]);
        const ConstRowMap b(bias.values.data(), f);
        const std::size_t out_steps = cache->shapes[li].steps;
        y.sequence = true;
        for (std::size_t t = 0; t < out_steps; ++t) {
          Mat z = Mat::Zero(n, f);
          for (std::size_t k = 0; k < layer.kernel_size; ++k) {
            const ConstMap w(kernel.values.data() + k * kernel.shape[1] *
                                                        kernel.shape[2],
                             c, f);
            z.noalias() += x.steps[t * layer.stride + k] * w;
          }
          z.rowwise() += b;
          y.steps.push_back(Activate(z, layer.activation));
          lc.pre.push_back(std::move(z));
        }
        break;
      }
      case LayerKind::kLstm: {
        const Param& kernel = weights.params.at(param);
        const Param& recurrent = weights.params.at(param + 1);
        const Param& bias = weights.params.at(param + 2);
        param += 3;
        const auto c = static_cast<Eigen::Index>(kernel.shape[0]);
        const auto h = static_cast<Eigen::Index>(layer.units);
        const ConstMap w(kernel.values.data(), c, 4 * h);
        const ConstMap u(recurrent.values.data(), h, 4 * h);
        const ConstRowMap b(bias.values.data(), 4 * h);
        Mat hidden = Mat::Zero(n, h);
        Mat cell = Mat::Zero(n, h);
        for (const Mat& xt : x.steps) {
          Mat a = xt * w;
          a.noalias() += hidden * u;
          a.rowwise() += b;
          Mat gates(n, 4 * h);
          gates.leftCols(h) = SigmoidOf(a.leftCols(h));
          gates.middleCols(h, h) = SigmoidOf(a.middleCols(h, h));
          gates.middleCols(2 * h, h) = a.middleCols(2 * h, h).array().tanh();
          gates.rightCols(h) = SigmoidOf(a.rightCols(h));
          cell = gates.middleCols(h, h).cwiseProduct(cell) +
                 gates.leftCols(h).cwiseProduct(gates.middleCols(2 * h, h));
          hidden = gates.rightCols(h).cwiseProduct(
              Mat(cell.array().tanh()));
          lc.gates.push_back(std::move(gates));
          lc.cells.push_back(cell);
          lc.hidden.push_back(hidden);
        }
        y.sequence = false;
        y.steps.push_back(hidden);
        break;
      }
      case LayerKind::kDense: {
        const Param& kernel = weights.params.at(param);
        const Param& bias = weights.params.at(param + 1);
        param += 2;
        const ConstMap w(kernel.values.data(),
                         static_cast<Eigen::Index>(kernel.shape[0]),
                         static_cast<Eigen::Index>(kernel.shape[1]));
        const ConstRowMap b(bias.values.data(),
                            static_cast<Eigen::Index>(bias.values.size()));
        lc.flat_input = Flatten(x);
        Mat z = lc.flat_input * w;
        z.rowwise() += b;
        const bool last = li + 1 == arch.layers.size();
        y.sequence = false;
        // The final sigmoid is applied when producing probabilities so that
        // the loss gradient can enter at the logit.
        y.steps.push_back(last ? z : Activate(z, layer.activation));
        if (last) logits = z;
        lc.pre.push_back(std::move(z));
        break;
      }
      case LayerKind::kDropout: {
        y = x;
        if (mode == Mode::kTrain && layer.rate > 0.0) {
          const double keep_scale = 1.0 / (1.0 - layer.rate);
          for (Mat& step : y.steps) {
            Mat mask(step.rows(), step.cols());
            for (Eigen::Index r = 0; r < mask.rows(); ++r) {
              for (Eigen::Index cc = 0; cc < mask.cols(); ++cc) {
                mask(r, cc) = uniform(dropout_rng) < layer.rate ? 0.0
                                                                : keep_scale;
              }
            }
            step = step.cwiseProduct(mask);
            lc.mask.push_back(std::move(mask));
          }
        }
        break;
      }
    }
    cache->layers.push_back(std::move(lc));
    x = std::move(y);
  }

  ForwardResult result;
  result.logits.resize(batch.n);
  result.probs.resize(batch.n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double z = logits(r, 0);
    if (!std::isfinite(z)) Fail(ErrorKind::kNumeric, "non-finite logit");
    result.logits[r] = z;
    result.probs[r] =
        std::clamp(SafeSigmoid(z), kProbClamp, 1.0 - kProbClamp);
  }
  cache->probs = result.probs;
  result.cache = std::move(cache);
  return result;
}

double LossBce(std::span<const double> probs, std::span<const int> labels,
               const ModelWeights& weights, double l2_lambda) {
  if (probs.size() != labels.size() || probs.empty()) {
    Fail(ErrorKind::kArgument, "loss: probs and labels differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
    total -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  double loss = total / static_cast<double>(probs.size());
  if (l2_lambda > 0.0) {
    double squares = 0.0;
    for (const auto& p : weights.params) {
      if (!p.decayed) continue;
      for (double v : p.values) squares += v * v;
    }
    loss += l2_lambda * squares;
  }
  return loss;
}

ModelWeights Backward(const ForwardResult& forward, std::span<const int> labels,
                      double l2_lambda) {
  const ForwardCache& cache = *forward.cache;
  if (labels.size() != cache.n) {
    Fail(ErrorKind::kArgument, "backward: label count differs from batch");
  }
  const auto n = static_cast<Eigen::Index>(cache.n);
  ModelWeights grads = cache.weights.ZerosLike();

  // d loss / d logit for mean BCE on sigmoid outputs.
  Mat upstream(n, 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    upstream(r, 0) = (SafeSigmoid(forward.logits[r]) - labels[r]) /
                     static_cast<double>(cache.n);
  }
  Tensor grad;
  grad.sequence = false;
  grad.steps.push_back(std::move(upstream));

  for (std::size_t li = cache.arch.layers.size(); li-- > 0;) {
    const LayerSpec& layer = cache.arch.layers[li];
    const LayerCache& lc = cache.layers[li];
    const bool need_input_grad = li > 0;
    Tensor down;
    down.sequence = lc.input.sequence;
    switch (layer.kind) {
      case LayerKind::kDense: {
        const Param& kernel = cache.weights.params[lc.first_param];
        const ConstMap w(kernel.values.data(),
                         static_cast<Eigen::Index>(kernel.shape[0]),
                         static_cast<Eigen::Index>(kernel.shape[1]));
        const bool last = li + 1 == cache.arch.layers.size();
        const Mat dz =
            last ? grad.steps.front()
                 : ActivationBackward(lc.pre.front(), grad.steps.front(),
                                      layer.activation);
        Param& gk = grads.params[lc.first_param];
        Param& gb = grads.params[lc.first_param + 1];
        MutMap(gk.values.data(), w.rows(), w.cols()).noalias() +=
            lc.flat_input.transpose() * dz;
        MutRowMap(gb.values.data(), dz.cols()) += dz.colwise().sum();
        if (need_input_grad) {
          const Mat dx = dz * w.transpose();
          if (lc.input.sequence) {
            down = Unflatten(dx, lc.input.steps.size());
            down.sequence = true;
          } else {
            down.steps.push_back(dx);
          }
        }
        break;
      }
      case LayerKind::kDropout: {
        down = grad;
        for (std::size_t s = 0; s < lc.mask.size(); ++s) {
          down.steps[s] = down.steps[s].cwiseProduct(lc.mask[s]);
        }
        break;
      }
      case LayerKind::kLstm: {
        const Param& kernel = cache.weights.params[lc.first_param];
        const Param& recurrent = cache.weights.params[lc.first_param + 1];
        const auto c = static_cast<Eigen::Index>(kernel.shape[0]);
        const auto h = static_cast<Eigen::Index>(layer.units);
        const ConstMap w(kernel.values.data(), c, 4 * h);
        const ConstMap u(recurrent.values.data(), h, 4 * h);
        MutMap gw(grads.params[lc.first_param].values.data(), c, 4 * h);
        MutMap gu(grads.params[lc.first_param + 1].values.data(), h, 4 * h);
        MutRowMap gb(grads.params[lc.first_param + 2].values.data(), 4 * h);

        const std::size_t steps = lc.input.steps.size();
        if (need_input_grad) down.steps.assign(steps, Mat());
        Mat dh = grad.steps.front();
        Mat dc = Mat::Zero(n, h);
        const Mat zeros = Mat::Zero(n, h);
        Mat da(n, 4 * h);
        for (std::size_t t = steps; t-- > 0;) {
          const Mat& g = lc.gates[t];
          const auto i_gate = g.leftCols(h);
          const auto f_gate = g.middleCols(h, h);
          const auto g_gate = g.middleCols(2 * h, h);
          const auto o_gate = g.rightCols(h);
          const Mat& c_prev = t > 0 ? lc.cells[t - 1] : zeros;
          const Mat& h_prev = t > 0 ? lc.hidden[t - 1] : zeros;
          const Mat tanh_c = lc.cells[t].array().tanh();

          const Mat d_o = dh.cwiseProduct(tanh_c);
          dc += dh.cwiseProduct(o_gate).cwiseProduct(
              Mat(1.0 - tanh_c.array().square()));
          const Mat d_i = dc.cwiseProduct(g_gate);
          const Mat d_g = dc.cwiseProduct(i_gate);
          const Mat d_f = dc.cwiseProduct(c_prev);

          da.leftCols(h) = d_i.array() * i_gate.array() * (1.0 - i_gate.array());
          da.middleCols(h, h) =
              d_f.array() * f_gate.array() * (1.0 - f_gate.array());
          da.middleCols(2 * h, h) =
              d_g.array() * (1.0 - g_gate.array().square());
          da.rightCols(h) = d_o.array() * o_gate.array() * (1.0 - o_gate.array());

          gw.noalias() += lc.input.steps[t].transpose() * da;
          gu.noalias() += h_prev.transpose() * da;
          gb += da.colwise().sum();
          if (need_input_grad) down.steps[t] = da * w.transpose();
          dh = da * u.transpose();
          dc = dc.cwiseProduct(f_gate);
        }
        break;
      }
      case LayerKind::kConv1d: {
        const Param& kernel = cache.weights.params[lc.first_param];
        const auto c = static_cast<Eigen::Index>(kernel.shape[1]);
        const auto f = static_cast<Eigen::Index>(kernel.shape[2]);
        Param& gk = grads.params[lc.first_param];
        MutRowMap gb(grads.params[lc.first_param + 1].values.data(), f);
        if (need_input_grad) {
          for (const Mat& s : lc.input.steps) {
            down.steps.push_back(Mat::Zero(s.rows(), s.cols()));
          }
        }
        for (std::size_t t = 0; t < lc.pre.size(); ++t) {
          const Mat dz =
              ActivationBackward(lc.pre[t], grad.steps[t], layer.activation);
          gb += dz.colwise().sum();
          for (std::size_t k = 0; k < layer.kernel_size; ++k) {
            const std::size_t offset =
                k * kernel.shape[1] * kernel.shape[2];
            const std::size_t src = t * layer.stride + k;
            MutMap(gk.values.data() + offset, c, f).noalias() +=
                lc.input.steps[src].transpose() * dz;
            if (need_input_grad) {
              const ConstMap w(kernel.values.data() + offset, c, f);
              down.steps[src].noalias() += dz * w.transpose();
            }
          }
        }
        break;
      }
    }
    grad = std::move(down);
  }

  if (l2_lambda > 0.0) {
    for (std::size_t p = 0; p < grads.params.size(); ++p) {
      if (!grads.params[p].decayed) continue;
      const auto& w = cache.weights.params[p].values;
      auto& g = grads.params[p].values;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * l2_lambda * w[i];
    }
  }
  return grads;
}

AdamState AdamState::For(const ModelWeights& weights) {
  return AdamState{weights.ZerosLike(), weights.ZerosLike(), 0};
}

void AdamStep(ModelWeights& weights, const ModelWeights& gradients,
              AdamState& state, double learning_rate) {
  if (!weights.SameLayout(gradients) || !weights.SameLayout(state.m)) {
    Fail(ErrorKind::kArgument, "adam: layout mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(kAdamBeta1, t);
  const double correction2 = 1.0 - std::pow(kAdamBeta2, t);
  for (std::size_t p = 0; p < weights.params.size(); ++p) {
    auto& w = weights.params[p].values;
    const auto& g = gradients.params[p].values;
    auto& m = state.m.params[p].values;
    auto& v = state.v.params[p].values;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
      v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    }
  }
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    Fail(ErrorKind::kValidation, "learning_rate must be positive");
  }
  if (batch_size == 0) Fail(ErrorKind::kValidation, "batch_size must be >= 1");
  if (!(l2_lambda >= 0.0)) {
    Fail(ErrorKind::kValidation, "l2_lambda must be non-negative");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    Fail(ErrorKind::kValidation, "validation_fraction must lie in (0, 1)");
  }
}

std::vector<double> Predict(const ModelWeights& weights,
                            const Architecture& arch, const Batch& batch) {
  return Forward(weights, arch, batch, Mode::kInfer).probs;
}

std::vector<int> HardLabels(std::span<const double> probs) {
  std::vector<int> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > 0.5;
  return out;
}

FitResult Fit(const data::WindowSet& train, const TrainConfig& config,
              const Architecture& arch, const ModelWeights* initial) {
  config.Validate();
  arch.Validate();
  if (train.CountLabel(0) == 0 || train.CountLabel(1) == 0) {
    Fail(ErrorKind::kValidation, "training set must contain both classes");
  }
  if (train.window_len != arch.input.window_len ||
      train.channels != arch.input.channels) {
    Fail(ErrorKind::kArgument, "window shape does not match model input");
  }

  FitResult result;
  ModelWeights weights = initial ? *initial : InitWeights(arch, config.seed);
  if (initial && !InitWeights(arch, 0).SameLayout(*initial)) {
    Fail(ErrorKind::kArgument, "initial weights do not match architecture");
  }

  // Validation slice for early stopping; stratified when both classes can
  // be represented on both sides.
  std::vector<std::size_t> fit_rows;
  std::vector<std::size_t> val_rows;
  const data::SplitSpec val_spec{config.validation_fraction,
                                 config.seed ^ 0x9E3779B97F4A7C15ULL, true};
  if (train.size() >= 4) {
    try {
      auto split = data::SplitIndices(train.labels, val_spec);
      fit_rows = std::move(split.train);
      val_rows = std::move(split.test);
    } catch (const Error&) {
      auto unstratified = val_spec;
      unstratified.stratified = false;
      auto split = data::SplitIndices(train.labels, unstratified);
      fit_rows = std::move(split.train);
      val_rows = std::move(split.test);
    }
  } else {
    fit_rows.resize(train.size());
    std::iota(fit_rows.begin(), fit_rows.end(), 0);
  }
  std::optional<Batch> val_batch;
  std::vector<int> val_labels;
  if (!val_rows.empty()) {
    val_batch = Batch::FromWindows(train, val_rows);
    for (std::size_t i : val_rows) val_labels.push_back(train.labels[i]);
  }

  result.weights = weights;
  if (config.max_epochs == 0) return result;

  AdamState state = AdamState::For(weights);
  std::mt19937_64 rng(config.seed + 1);
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<int> batch_labels;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(fit_rows.begin(), fit_rows.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < fit_rows.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(fit_rows.size(), start + config.batch_size);
      const std::span<const std::size_t> rows(fit_rows.data() + start,
                                              end - start);
      const Batch batch = Batch::FromWindows(train, rows);
      batch_labels.clear();
      for (std::size_t i : rows) batch_labels.push_back(train.labels[i]);
      const auto forward = Forward(weights, arch, batch, Mode::kTrain, rng());
      const double loss =
          LossBce(forward.probs, batch_labels, weights, config.l2_lambda);
      if (!std::isfinite(loss)) Fail(ErrorKind::kNumeric, "loss diverged");
      epoch_loss += loss * static_cast<double>(rows.size());
      const auto grads = Backward(forward, batch_labels, config.l2_lambda);
      AdamStep(weights, grads, state, config.learning_rate);
    }
    result.train_loss.push_back(epoch_loss /
                                static_cast<double>(fit_rows.size()));
    result.epochs_run = epoch;

    if (!val_batch) {
      result.weights = weights;
      result.best_epoch = epoch;
      continue;
    }
    const auto probs = Predict(weights, arch, *val_batch);
    const double val_loss = LossBce(probs, val_labels, weights, 0.0);
    result.validation_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.weights = weights;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience && config.patience > 0) {
      break;
    }
  }
  return result;
}

}  // namespace foglab::nn
