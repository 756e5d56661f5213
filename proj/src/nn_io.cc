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

#include <sstream>

#include "foglab/error.h"
#include "foglab/nn.h"
#include "foglab/text_io.h"

namespace foglab::nn {

namespace {

constexpr std::string_view kMagic = "foglab-weights";
constexpr int kVersion = 1;

Activation AttributeActivation(TokenReader& tokens) {
  const auto value = ParseActivation(tokens.Attribute("activation"));
  if (!value) tokens.Malformed("unknown activation");
  return *value;
}

}  // namespace

std::string FormatWeights(const Architecture& arch,
                          const ModelWeights& weights) {
  std::ostringstream out;
  out << kMagic << " " << kVersion << "\n";
  out << "input " << arch.input.window_len << " " << arch.input.channels
      << "\n";
  out << "layers " << arch.layers.size() << "\n";
  for (const LayerSpec& layer : arch.layers) {
    switch (layer.kind) {
      case LayerKind::kConv1d:
        out << "conv1d filters=" << layer.filters
            << " kernel=" << layer.kernel_size << " stride=" << layer.stride
            << " activation=" << ActivationName(layer.activation) << "\n";
        break;
      case LayerKind::kLstm:
        out << "lstm units=" << layer.units << "\n";
        break;
      case LayerKind::kDense:
        out << "dense units=" << layer.units
            << " activation=" << ActivationName(layer.activation) << "\n";
        break;
      case LayerKind::kDropout:
        out << "dropout rate=" << FormatDouble(layer.rate) << "\n";
        break;
    }
  }
  out << "params " << weights.params.size() << "\n";
  for (const Param& p : weights.params) {
    out << "param " << p.name << " decayed=" << (p.decayed ? 1 : 0)
        << " rank=" << p.shape.size();
    for (auto d : p.shape) out << " " << d;
    out << "\n";
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      out << FormatDouble(p.values[i]);
      out << ((i + 1) % 8 == 0 || i + 1 == p.values.size() ? '\n' : ' ');
    }
  }
  out << "end\n";
  return out.str();
}

void ParseWeights(std::string_view text, Architecture* arch,
                  ModelWeights* weights) {
  TokenReader tokens(text, "weight file");
  tokens.Expect(kMagic);
  if (tokens.Size() != kVersion) tokens.Malformed("unsupported version");
  Architecture parsed_arch;
  tokens.Expect("input");
  parsed_arch.input.window_len = tokens.Size();
  parsed_arch.input.channels = tokens.Size();
  tokens.Expect("layers");
  const std::size_t layer_count = tokens.Size();
  for (std::size_t i = 0; i < layer_count; ++i) {
    const auto kind = tokens.Next();
    if (kind == "conv1d") {
      const auto filters = tokens.SizeAttribute("filters");
      const auto kernel = tokens.SizeAttribute("kernel");
      const auto stride = tokens.SizeAttribute("stride");
      parsed_arch.layers.push_back(LayerSpec::Conv1d(
          filters, kernel, stride, AttributeActivation(tokens)));
    } else if (kind == "lstm") {
      parsed_arch.layers.push_back(
          LayerSpec::Lstm(tokens.SizeAttribute("units")));
    } else if (kind == "dense") {
      const auto units = tokens.SizeAttribute("units");
      parsed_arch.layers.push_back(
          LayerSpec::Dense(units, AttributeActivation(tokens)));
    } else if (kind == "dropout") {
      const auto rate = ParseDouble(tokens.Attribute("rate"));
      if (!rate) tokens.Malformed("bad dropout rate");
      parsed_arch.layers.push_back(LayerSpec::Dropout(*rate));
    } else {
      tokens.Malformed("unknown layer kind '" + std::string(kind) + "'");
    }
  }
  parsed_arch.Validate();

  ModelWeights parsed;
  tokens.Expect("params");
  const std::size_t param_count = tokens.Size();
  for (std::size_t i = 0; i < param_count; ++i) {
    tokens.Expect("param");
    Param p;
    p.name = std::string(tokens.Next());
    p.decayed = tokens.SizeAttribute("decayed") != 0;
    const std::size_t rank = tokens.SizeAttribute("rank");
    std::size_t count = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      p.shape.push_back(tokens.Size());
      count *= p.shape.back();
    }
    p.values.resize(count);
    for (auto& v : p.values) v = tokens.Real();
    parsed.params.push_back(std::move(p));
  }
  tokens.Expect("end");
  if (!InitWeights(parsed_arch, 0).SameLayout(parsed)) {
    tokens.Malformed("parameters do not match the declared architecture");
  }
  if (arch) *arch = std::move(parsed_arch);
  if (weights) *weights = std::move(parsed);
}

void SaveWeights(const std::filesystem::path& path, const Architecture& arch,
                 const ModelWeights& weights) {
  WriteFile(path, FormatWeights(arch, weights));
}

void LoadWeights(const std::filesystem::path& path, Architecture* arch,
                 ModelWeights* weights) {
  ParseWeights(ReadFile(path), arch, weights);
}

}  // namespace foglab::nn
