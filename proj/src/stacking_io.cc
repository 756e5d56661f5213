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
#include <type_traits>
#include <variant>

#include "foglab/error.h"
#include "foglab/stacking.h"
#include "foglab/text_io.h"

namespace foglab::stacking {

namespace {

constexpr int kVersion = 1;

void ReadHeader(TokenReader& tokens, std::string_view magic) {
  tokens.Expect(magic);
  if (tokens.Int() != kVersion) tokens.Malformed("unsupported version");
}

void WriteLogistic(std::ostream& out, const LogisticModel& model) {
  const LogisticConfig& c = model.config;
  out << "foglab-logistic " << kVersion << "\n";
  out << "config learning_rate=" << FormatDouble(c.learning_rate)
      << " max_iters=" << c.max_iters << " tol=" << FormatDouble(c.tol)
      << " l2=" << FormatDouble(c.l2)
      << " standardize=" << (c.standardize ? 1 : 0) << "\n";
  out << "fit iterations=" << model.iterations
      << " gradient_norm=" << FormatDouble(model.gradient_norm) << "\n";
  out << "bias " << FormatDouble(model.bias) << "\n";
  out << "weights " << model.weights.size();
  for (double w : model.weights) out << " " << FormatDouble(w);
  out << "\nend-logistic\n";
}

LogisticModel ReadLogistic(TokenReader& tokens) {
  ReadHeader(tokens, "foglab-logistic");
  LogisticModel model;
  LogisticConfig& c = model.config;
  tokens.Expect("config");
  c.learning_rate = tokens.RealAttribute("learning_rate");
  c.max_iters = tokens.SizeAttribute("max_iters");
  c.tol = tokens.RealAttribute("tol");
  c.l2 = tokens.RealAttribute("l2");
  c.standardize = tokens.SizeAttribute("standardize") != 0;
  tokens.Expect("fit");
  model.iterations = tokens.SizeAttribute("iterations");
  model.gradient_norm = tokens.RealAttribute("gradient_norm");
  tokens.Expect("bias");
  model.bias = tokens.Real();
  tokens.Expect("weights");
  model.weights.resize(tokens.Size());
  for (double& w : model.weights) w = tokens.Real();
  tokens.Expect("end-logistic");
  return model;
}

void WriteBase(std::ostream& out, const BaseModel& model) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, trees::ForestModel>) {
          trees::WriteForest(out, m);
        } else if constexpr (std::is_same_v<T, trees::GbmModel>) {
          trees::WriteGbm(out, m);
        } else {
          WriteLogistic(out, m);
        }
      },
      model);
}

void WriteStack(std::ostream& out, const StackModel& model) {
  out << "foglab-stack " << kVersion << "\n";
  out << "config cv_folds=" << model.cv_folds << " passthrough=0 seed="
      << model.seed << "\n";
  out << "features " << model.n_features << "\n";
  out << "bases " << model.base.size() << "\n";
  for (std::size_t b = 0; b < model.base.size(); ++b) {
    out << "base name=" << model.names[b] << "\n";
    WriteBase(out, model.base[b]);
  }
  out << "meta\n";
  WriteLogistic(out, model.meta);
  out << "end-stack\n";
}

BaseModel ReadBase(TokenReader& tokens) {
  TokenReader probe = tokens;
  const auto magic = probe.Next();
  if (magic == "foglab-forest") return trees::ReadForest(tokens);
  if (magic == "foglab-gbm") return trees::ReadGbm(tokens);
  if (magic == "foglab-logistic") return ReadLogistic(tokens);
  tokens.Malformed("unknown base model '" + std::string(magic) + "'");
}

StackModel ReadStack(TokenReader& tokens) {
  ReadHeader(tokens, "foglab-stack");
  StackModel model;
  tokens.Expect("config");
  model.cv_folds = tokens.SizeAttribute("cv_folds");
  if (tokens.SizeAttribute("passthrough") != 0) {
    tokens.Malformed("passthrough stacks are not supported");
  }
  model.seed = tokens.SizeAttribute("seed");
  tokens.Expect("features");
  model.n_features = tokens.Size();
  tokens.Expect("bases");
  const std::size_t count = tokens.Size();
  for (std::size_t b = 0; b < count; ++b) {
    tokens.Expect("base");
    model.names.emplace_back(tokens.Attribute("name"));
    model.base.push_back(ReadBase(tokens));
    if (FeatureCount(model.base.back()) != model.n_features) {
      tokens.Malformed("base model feature count differs from the stack");
    }
  }
  tokens.Expect("meta");
  model.meta = ReadLogistic(tokens);
  if (model.meta.weights.size() != count) {
    tokens.Malformed("meta-learner width differs from the base count");
  }
  tokens.Expect("end-stack");
  return model;
}

template <typename T, typename Reader>
T ParseWhole(std::string_view text, const char* context, Reader read) {
  TokenReader tokens(text, context);
  T model = read(tokens);
  if (!tokens.AtEnd()) tokens.Malformed("trailing content");
  return model;
}

}  // namespace

std::string FormatLogistic(const LogisticModel& model) {
  std::ostringstream out;
  WriteLogistic(out, model);
  return out.str();
}

LogisticModel ParseLogistic(std::string_view text) {
  return ParseWhole<LogisticModel>(text, "logistic file", ReadLogistic);
}

std::string FormatStack(const StackModel& model) {
  std::ostringstream out;
  WriteStack(out, model);
  return out.str();
}

StackModel ParseStack(std::string_view text) {
  return ParseWhole<StackModel>(text, "stack file", ReadStack);
}

std::string FormatLearner(const LearnerModel& model) {
  std::ostringstream out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StackModel>) {
          WriteStack(out, m);
        } else {
          WriteBase(out, m);
        }
      },
      model);
  return out.str();
}

LearnerModel ParseLearner(std::string_view text) {
  TokenReader tokens(text, "model file");
  TokenReader probe = tokens;
  LearnerModel model;
  if (probe.Next() == "foglab-stack") {
    model = ReadStack(tokens);
  } else {
    std::visit([&](auto&& m) { model = std::move(m); }, ReadBase(tokens));
  }
  if (!tokens.AtEnd()) tokens.Malformed("trailing content");
  return model;
}

void SaveLearner(const std::filesystem::path& path, const LearnerModel& model) {
  WriteFile(path, FormatLearner(model));
}

LearnerModel LoadLearner(const std::filesystem::path& path) {
  return ParseLearner(ReadFile(path));
}

}  // namespace foglab::stacking
