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

#include "foglab/config.h"

#include <algorithm>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "foglab/error.h"
#include "foglab/text_io.h"

namespace foglab::config {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void SchemaError(const std::string& path, const std::string& what) {
  Fail(ErrorKind::kSchema, "config " + path + ": " + what);
}

// Reads declared keys out of one JSON object; Finish() rejects the rest.
class Reader {
 public:
  Reader(const Json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) SchemaError(Where(), "expected an object");
  }

  std::string Where(std::string_view key = {}) const {
    std::string p = path_.empty() ? "<root>" : path_;
    if (!key.empty()) p = path_.empty() ? std::string(key) : p + "." + std::string(key);
    return p;
  }

  const Json* Find(std::string_view key) {
    seen_.emplace(key);
    auto it = object_.find(std::string(key));
    return it == object_.end() ? nullptr : &*it;
  }

  template <typename T>
  void operator()(std::string_view key, T& field) {
    if (const Json* j = Find(key)) Read(*j, Where(key), field);
  }

  template <typename T, typename Fn>
  void Object(std::string_view key, T& field, Fn&& fields) {
    if (const Json* j = Find(key)) {
      Reader sub(*j, Where(key));
      fields(sub, field);
      sub.Finish();
    }
  }

  void Finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.count(it.key())) SchemaError(Where(it.key()), "unknown key");
    }
  }

 private:
  static void Read(const Json& j, const std::string& where, bool& out) {
    if (!j.is_boolean()) SchemaError(where, "expected true or false");
    out = j.get<bool>();
  }
  static std::uint64_t Unsigned(const Json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    SchemaError(where, "expected a non-negative integer");
  }
  static void Read(const Json& j, const std::string& where, std::size_t& out) {
    out = static_cast<std::size_t>(Unsigned(j, where));
  }
  static void Read(const Json& j, const std::string& where, int& out) {
    if (!j.is_number_integer()) SchemaError(where, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX) SchemaError(where, "out of range");
    out = static_cast<int>(v);
  }
  static void Read(const Json& j, const std::string& where, double& out) {
    if (!j.is_number()) SchemaError(where, "expected a number");
    out = j.get<double>();
  }
  static void Read(const Json& j, const std::string& where, std::string& out) {
    if (!j.is_string()) SchemaError(where, "expected a string");
    out = j.get<std::string>();
  }
  static void Read(const Json& j, const std::string& where,
                   std::vector<std::string>& out) {
    if (!j.is_array()) SchemaError(where, "expected a list of strings");
    out.clear();
    for (const auto& e : j) {
      if (!e.is_string()) SchemaError(where, "expected a list of strings");
      out.push_back(e.get<std::string>());
    }
  }
  template <typename T>
  static void Read(const Json& j, const std::string& where,
                   std::optional<T>& out) {
    if (j.is_null()) {
      out.reset();
      return;
    }
    T value{};
    Read(j, where, value);
    out = value;
  }
  template <typename E, typename Parse>
  static void ReadEnum(const Json& j, const std::string& where, E& out,
                       Parse parse, std::string_view choices) {
    if (j.is_string()) {
      if (auto v = parse(j.get<std::string>())) {
        out = *v;
        return;
      }
    }
    SchemaError(where, "expected one of " + std::string(choices));
  }
  static void Read(const Json& j, const std::string& where,
                   trees::Criterion& out) {
    ReadEnum(j, where, out, trees::ParseCriterion, "gini, entropy");
  }
  static void Read(const Json& j, const std::string& where,
                   trees::Splitter& out) {
    ReadEnum(j, where, out, trees::ParseSplitter, "best, random");
  }
  static void Read(const Json& j, const std::string& where,
                   trees::MaxFeatures& out) {
    ReadEnum(j, where, out, trees::ParseMaxFeatures, "sqrt, all");
  }
  static void Read(const Json& j, const std::string& where,
                   data::LabelRule& out) {
    ReadEnum(j, where, out, data::ParseLabelRule,
             "majority, any_positive, last_sample");
  }

  const Json& object_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

class Writer {
 public:
  Json& json() { return json_; }

  template <typename T>
  void operator()(std::string_view key, const T& field) {
    json_[std::string(key)] = Value(field);
  }

  template <typename T, typename Fn>
  void Object(std::string_view key, T& field, Fn&& fields) {
    Writer sub;
    fields(sub, field);
    json_[std::string(key)] = std::move(sub.json_);
  }

 private:
  template <typename T>
  static Json Value(const T& v) {
    return Json(v);
  }
  template <typename T>
  static Json Value(const std::optional<T>& v) {
    return v ? Value(*v) : Json();
  }
  static Json Value(trees::Criterion v) {
    return std::string(trees::CriterionName(v));
  }
  static Json Value(trees::Splitter v) {
    return std::string(trees::SplitterName(v));
  }
  static Json Value(trees::MaxFeatures v) {
    return std::string(trees::MaxFeaturesName(v));
  }
  static Json Value(data::LabelRule v) {
    return std::string(data::LabelRuleName(v));
  }

  Json json_ = Json::object();
};

template <typename V>
void ForestFields(V& v, trees::ForestConfig& c) {
  v("n_estimators", c.n_estimators);
  v("max_depth", c.max_depth);
  v("min_samples_split", c.min_samples_split);
  v("min_samples_leaf", c.min_samples_leaf);
  v("criterion", c.criterion);
  v("splitter", c.splitter);
  v("bootstrap", c.bootstrap);
  v("max_features", c.max_features);
  v("seed", c.seed);
}

template <typename V>
void GbmFields(V& v, trees::GbmConfig& c) {
  v("iterations", c.iterations);
  v("depth", c.depth);
  v("learning_rate", c.learning_rate);
  v("l2_leaf_reg", c.l2_leaf_reg);
  v("seed", c.seed);
}

template <typename V>
void LogisticFields(V& v, stacking::LogisticConfig& c) {
  v("learning_rate", c.learning_rate);
  v("max_iters", c.max_iters);
  v("tol", c.tol);
  v("l2", c.l2);
  v("standardize", c.standardize);
}

template <typename V>
void ColumnFields(V& v, data::ColumnSchema& c) {
  v("time_s", c.time_s);
  v("acc_ml", c.acc_ml);
  v("acc_ap", c.acc_ap);
  v("acc_si", c.acc_si);
  v("gyr_ml", c.gyr_ml);
  v("gyr_ap", c.gyr_ap);
  v("gyr_si", c.gyr_si);
  v("label", c.label);
  v("user_id", c.user_id);
}

template <typename V>
void SyntheticFields(V& v, data::SyntheticConfig& c) {
  v("users", c.users);
  v("samples_per_user", c.samples_per_user);
  v("positive_ratio", c.positive_ratio);
  v("separation", c.separation);
  v("user_heterogeneity", c.user_heterogeneity);
  v("sample_rate_hz", c.sample_rate_hz);
  v("seed", c.seed);
}

template <typename V>
void CentralFields(V& v, CentralSection& c) {
  v("models", c.models);
  v("test_fraction", c.test_fraction);
  v("stratified", c.stratified);
  v("balance_ratio", c.balance_ratio);
  v("seed", c.seed);
}

template <typename V>
void ExplainFields(V& v, ExplainSection& c) {
  v("model_file", c.model_file);
  v("max_rows", c.max_rows);
  v("background_rows", c.background_rows);
  v("seed", c.seed);
}

template <typename V>
void TrainFields(V& v, nn::TrainConfig& c) {
  v("learning_rate", c.learning_rate);
  v("batch_size", c.batch_size);
  v("max_epochs", c.max_epochs);
  v("l2_lambda", c.l2_lambda);
  v("patience", c.patience);
  v("validation_fraction", c.validation_fraction);
}

template <typename V>
void FedFields(V& v, fed::FedConfig& c) {
  v("rounds", c.rounds);
  v("min_samples_per_user", c.min_samples_per_user);
  v("window_len", c.window_len);
  v("stride", c.stride);
  v("label_rule", c.label_rule);
  v("global_test_fraction", c.global_test_fraction);
  v("local_test_fraction", c.local_test_fraction);
  v("balance_ratio", c.balance_ratio);
  v("units", c.units);
  v("filters", c.filters);
  v("kernel_size", c.kernel_size);
  v("dropout", c.dropout);
  v.Object("local", c.local, [](auto& v, auto& c) { TrainFields(v, c); });
  v("seed", c.seed);
}

std::string_view BaseKind(const stacking::BaseConfig& c) {
  switch (c.index()) {
    case 0: return "forest";
    case 1: return "gbm";
    default: return "logistic";
  }
}

Json WriteBase(const stacking::NamedBase& base) {
  Writer w;
  w("name", base.name);
  w("kind", std::string(BaseKind(base.config)));
  std::visit(
      [&](auto c) {
        using T = decltype(c);
        if constexpr (std::is_same_v<T, trees::ForestConfig>) {
          ForestFields(w, c);
        } else if constexpr (std::is_same_v<T, trees::GbmConfig>) {
          GbmFields(w, c);
        } else {
          LogisticFields(w, c);
        }
      },
      base.config);
  return std::move(w.json());
}

stacking::NamedBase ReadBase(const Json& j, const std::string& where,
                             std::uint64_t seed) {
  Reader r(j, where);
  stacking::NamedBase base;
  r("name", base.name);
  std::string kind;
  r("kind", kind);
  if (base.name.empty()) SchemaError(r.Where("name"), "required");
  if (kind == "forest") {
    trees::ForestConfig c = trees::ForestConfig::RandomForest();
    c.seed = seed;
    ForestFields(r, c);
    base.config = c;
  } else if (kind == "gbm") {
    trees::GbmConfig c;
    c.seed = seed;
    GbmFields(r, c);
    base.config = c;
  } else if (kind == "logistic") {
    stacking::LogisticConfig c;
    LogisticFields(r, c);
    base.config = c;
  } else {
    SchemaError(r.Where("kind"), "expected one of forest, gbm, logistic");
  }
  r.Finish();
  return base;
}

template <typename V>
void StackScalarFields(V& v, stacking::StackConfig& c) {
  v("cv_folds", c.cv_folds);
  v("passthrough", c.passthrough);
  v("seed", c.seed);
  v.Object("meta", c.meta, [](auto& v, auto& c) { LogisticFields(v, c); });
}

Json WriteStack(stacking::StackConfig c) {
  Writer w;
  StackScalarFields(w, c);
  Json bases = Json::array();
  for (const auto& b : c.base) bases.push_back(WriteBase(b));
  w.json()["bases"] = std::move(bases);
  return std::move(w.json());
}

void ReadStack(Reader& r, stacking::StackConfig& c, std::uint64_t seed) {
  StackScalarFields(r, c);
  if (const Json* bases = r.Find("bases")) {
    if (!bases->is_array()) SchemaError(r.Where("bases"), "expected a list");
    c.base.clear();
    for (std::size_t i = 0; i < bases->size(); ++i) {
      c.base.push_back(ReadBase((*bases)[i],
                                r.Where("bases") + "[" + std::to_string(i) + "]",
                                seed));
    }
  }
}

Json WriteLearner(const stacking::LearnerConfig& config) {
  return std::visit(
      [](auto c) -> Json {
        using T = decltype(c);
        if constexpr (std::is_same_v<T, stacking::StackConfig>) {
          return WriteStack(c);
        } else {
          Writer w;
          if constexpr (std::is_same_v<T, trees::ForestConfig>) {
            ForestFields(w, c);
          } else if constexpr (std::is_same_v<T, trees::GbmConfig>) {
            GbmFields(w, c);
          } else {
            LogisticFields(w, c);
          }
          return std::move(w.json());
        }
      },
      config);
}

// Applies the keys of `j` on top of `config`.
void ReadLearner(const Json& j, const std::string& where,
                 stacking::LearnerConfig& config, std::uint64_t seed) {
  Reader r(j, where);
  std::visit(
      [&](auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, stacking::StackConfig>) {
          ReadStack(r, c, seed);
        } else if constexpr (std::is_same_v<T, trees::ForestConfig>) {
          ForestFields(r, c);
        } else if constexpr (std::is_same_v<T, trees::GbmConfig>) {
          GbmFields(r, c);
        } else {
          LogisticFields(r, c);
        }
      },
      config);
  r.Finish();
}

void ApplyOverride(Json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    Fail(ErrorKind::kSchema,
         "override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  if (value.is_object() || value.is_array()) {
    Fail(ErrorKind::kSchema, "override '" + key + "' must set a scalar value");
  }
  std::vector<std::string> parts;
  for (auto f : SplitFields(key, '.')) parts.emplace_back(f);
  Json* node = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    Json& next = (*node)[parts[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) {
      Fail(ErrorKind::kSchema, "override '" + key + "': '" + parts[i] +
                                   "' is not a section");
    }
    node = &next;
  }
  const Json* existing =
      node->contains(parts.back()) ? &(*node)[parts.back()] : nullptr;
  if (existing && (existing->is_object() || existing->is_array())) {
    Fail(ErrorKind::kSchema, "override '" + key + "' names a section");
  }
  (*node)[parts.back()] = std::move(value);
}

std::string Resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) {
    return p;
  }
  return (base / p).lexically_normal().string();
}

void SetSeeds(ExperimentConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.data.synthetic.seed = seed;
  c.central.seed = seed;
  c.models.random_forest.seed = seed;
  c.models.extra_trees.seed = seed;
  c.models.gbm.seed = seed;
  c.models.stack.seed = seed;
  for (auto& b : c.models.stack.base) {
    std::visit(
        [&](auto& m) {
          if constexpr (requires { m.seed; }) m.seed = seed;
        },
        b.config);
  }
  c.nested_cv.seed = seed;
  c.explain.seed = seed;
  c.federated.seed = seed;
}

}  // namespace

ModelsSection::ModelsSection()
    : random_forest(trees::ForestConfig::RandomForest()),
      extra_trees(trees::ForestConfig::ExtraTrees()),
      stack(stacking::StackConfig::Default()) {
  random_forest.n_estimators = 50;
  random_forest.max_depth = 2;
  random_forest.min_samples_split = 2;
  extra_trees.n_estimators = 10;
  extra_trees.criterion = trees::Criterion::kEntropy;
  extra_trees.min_samples_leaf = 4;
  extra_trees.min_samples_split = 2;
  extra_trees.max_depth = 0;
  logistic.standardize = true;
}

std::filesystem::path ExperimentConfig::DatasetPath() const {
  return data.dataset.empty() ? OutputDir() / "dataset.csv"
                              : std::filesystem::path(data.dataset);
}

std::filesystem::path ExperimentConfig::ModelFile() const {
  return explain.model_file.empty() ? OutputDir() / "models" / "stack.model"
                                    : std::filesystem::path(explain.model_file);
}

data::ColumnSchema CanonicalSchema() {
  data::ColumnSchema s;
  s.user_id = "User";
  return s;
}

const std::vector<std::string>& ModelNames() {
  static const std::vector<std::string> names{
      "random_forest", "extra_trees", "gbm", "logistic", "stack"};
  return names;
}

stacking::LearnerConfig ModelConfig(const ExperimentConfig& config,
                                    std::string_view name) {
  if (name == "random_forest") return config.models.random_forest;
  if (name == "extra_trees") return config.models.extra_trees;
  if (name == "gbm") return config.models.gbm;
  if (name == "logistic") return config.models.logistic;
  if (name == "stack") return config.models.stack;
  Fail(ErrorKind::kSchema,
       "unknown model '" + std::string(name) +
           "' (expected random_forest, extra_trees, gbm, logistic, stack)");
}

void ExperimentConfig::Validate() const {
  if (output_dir.empty()) Fail(ErrorKind::kSchema, "output_dir is empty");
  for (const auto& s : data.sources) {
    if (s.path.empty()) Fail(ErrorKind::kSchema, "data.sources: empty path");
  }
  if (data.synthetic.users < 1 || data.synthetic.samples_per_user < 1) {
    Fail(ErrorKind::kValidation,
         "data.synthetic needs at least one user and one sample");
  }
  if (central.models.empty()) {
    Fail(ErrorKind::kSchema, "central.models lists no model");
  }
  for (const auto& m : central.models) ModelConfig(*this, m);
  if (!(central.test_fraction > 0.0 && central.test_fraction < 1.0)) {
    Fail(ErrorKind::kValidation, "central.test_fraction must lie in (0, 1)");
  }
  if (central.balance_ratio && !(*central.balance_ratio >= 1.0)) {
    Fail(ErrorKind::kValidation, "central.balance_ratio must be >= 1");
  }
  models.random_forest.Validate();
  models.extra_trees.Validate();
  models.gbm.Validate();
  models.logistic.Validate();
  models.stack.Validate();
  ModelConfig(*this, nested_cv.model);
  if (nested_cv.outer_k < 2 || nested_cv.inner_k < 2) {
    Fail(ErrorKind::kValidation, "nested_cv needs outer_k and inner_k >= 2");
  }
  for (const auto& g : nested_cv.grid) {
    std::visit([](const auto& c) { c.Validate(); }, g);
  }
  if (explain.max_rows < 1 || explain.background_rows < 1) {
    Fail(ErrorKind::kValidation,
         "explain.max_rows and explain.background_rows must be >= 1");
  }
  federated.Validate();
}

ExperimentConfig ParseConfig(std::string_view text,
                             const std::vector<std::string>& overrides,
                             const std::filesystem::path& base_dir) {
  Json root = Json::parse(text, nullptr, false, true);
  if (root.is_discarded()) {
    Fail(ErrorKind::kParse, "config is not valid JSON");
  }
  if (root.is_null()) root = Json::object();
  if (!root.is_object()) Fail(ErrorKind::kSchema, "config must be an object");
  for (const auto& o : overrides) ApplyOverride(root, o);

  Reader r(root, "");
  std::string schema(kSchemaVersion);
  r("schema", schema);
  if (schema != kSchemaVersion) {
    SchemaError("schema", "unsupported version '" + schema + "' (expected " +
                              std::string(kSchemaVersion) + ")");
  }
  ExperimentConfig c;
  std::uint64_t seed = c.seed;
  r("seed", seed);
  SetSeeds(c, seed);
  r("output_dir", c.output_dir);

  if (const Json* d = r.Find("data")) {
    Reader dr(*d, "data");
    if (const Json* sources = dr.Find("sources")) {
      if (!sources->is_array()) SchemaError("data.sources", "expected a list");
      for (std::size_t i = 0; i < sources->size(); ++i) {
        Reader sr((*sources)[i], "data.sources[" + std::to_string(i) + "]");
        SourceSpec s;
        sr("path", s.path);
        sr("user_id", s.user_id);
        sr.Finish();
        c.data.sources.push_back(s);
      }
    }
    dr.Object("columns", c.data.columns,
              [](auto& v, auto& x) { ColumnFields(v, x); });
    dr("dataset", c.data.dataset);
    dr.Object("synthetic", c.data.synthetic,
              [](auto& v, auto& x) { SyntheticFields(v, x); });
    dr.Finish();
  }
  r.Object("central", c.central, [](auto& v, auto& x) { CentralFields(v, x); });

  if (const Json* m = r.Find("models")) {
    Reader mr(*m, "models");
    mr.Object("random_forest", c.models.random_forest,
              [](auto& v, auto& x) { ForestFields(v, x); });
    mr.Object("extra_trees", c.models.extra_trees,
              [](auto& v, auto& x) { ForestFields(v, x); });
    mr.Object("gbm", c.models.gbm, [](auto& v, auto& x) { GbmFields(v, x); });
    mr.Object("logistic", c.models.logistic,
              [](auto& v, auto& x) { LogisticFields(v, x); });
    mr.Object("stack", c.models.stack,
              [seed](auto& v, auto& x) { ReadStack(v, x, seed); });
    mr.Finish();
  }

  if (const Json* n = r.Find("nested_cv")) {
    Reader nr(*n, "nested_cv");
    nr("model", c.nested_cv.model);
    nr("outer_k", c.nested_cv.outer_k);
    nr("inner_k", c.nested_cv.inner_k);
    nr("seed", c.nested_cv.seed);
    const stacking::LearnerConfig base = ModelConfig(c, c.nested_cv.model);
    if (const Json* grid = nr.Find("grid")) {
      if (!grid->is_array()) SchemaError("nested_cv.grid", "expected a list");
      for (std::size_t i = 0; i < grid->size(); ++i) {
        stacking::LearnerConfig point = base;
        ReadLearner((*grid)[i], "nested_cv.grid[" + std::to_string(i) + "]",
                    point, seed);
        c.nested_cv.grid.push_back(std::move(point));
      }
    }
    nr.Finish();
  }
  if (c.nested_cv.grid.empty()) {
    c.nested_cv.grid.push_back(ModelConfig(c, c.nested_cv.model));
  }
  r.Object("explain", c.explain, [](auto& v, auto& x) { ExplainFields(v, x); });
  r.Object("federated", c.federated, [](auto& v, auto& x) { FedFields(v, x); });
  r.Finish();

  c.output_dir = Resolve(base_dir, c.output_dir);
  for (auto& s : c.data.sources) s.path = Resolve(base_dir, s.path);
  c.data.dataset = Resolve(base_dir, c.data.dataset);
  c.explain.model_file = Resolve(base_dir, c.explain.model_file);
  if (c.data.dataset.empty()) c.data.dataset = c.DatasetPath().string();
  if (c.explain.model_file.empty()) {
    c.explain.model_file = c.ModelFile().string();
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  return ParseConfig(ReadFile(path), overrides, path.parent_path());
}

std::string ResolvedJson(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  Writer w;
  w("schema", std::string(kSchemaVersion));
  w("seed", c.seed);
  w("output_dir", c.output_dir);
  {
    Writer d;
    Json sources = Json::array();
    for (auto& s : c.data.sources) {
      Writer sw;
      sw("path", s.path);
      sw("user_id", s.user_id);
      sources.push_back(std::move(sw.json()));
    }
    d.json()["sources"] = std::move(sources);
    d.Object("columns", c.data.columns,
             [](auto& v, auto& x) { ColumnFields(v, x); });
    d("dataset", c.data.dataset);
    d.Object("synthetic", c.data.synthetic,
             [](auto& v, auto& x) { SyntheticFields(v, x); });
    w.json()["data"] = std::move(d.json());
  }
  w.Object("central", c.central, [](auto& v, auto& x) { CentralFields(v, x); });
  {
    Json m = Json::object();
    m["random_forest"] = WriteLearner(c.models.random_forest);
    m["extra_trees"] = WriteLearner(c.models.extra_trees);
    m["gbm"] = WriteLearner(c.models.gbm);
    m["logistic"] = WriteLearner(c.models.logistic);
    m["stack"] = WriteStack(c.models.stack);
    w.json()["models"] = std::move(m);
  }
  {
    Writer n;
    n("model", c.nested_cv.model);
    n("outer_k", c.nested_cv.outer_k);
    n("inner_k", c.nested_cv.inner_k);
    n("seed", c.nested_cv.seed);
    Json grid = Json::array();
    for (const auto& g : c.nested_cv.grid) grid.push_back(WriteLearner(g));
    n.json()["grid"] = std::move(grid);
    w.json()["nested_cv"] = std::move(n.json());
  }
  w.Object("explain", c.explain, [](auto& v, auto& x) { ExplainFields(v, x); });
  w.Object("federated", c.federated, [](auto& v, auto& x) { FedFields(v, x); });
  return w.json().dump(2) + "\n";
}

}  // namespace foglab::config
