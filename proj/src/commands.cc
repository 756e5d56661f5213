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

#include "foglab/commands.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "foglab/data.h"
#include "foglab/eval.h"
#include "foglab/explain.h"
#include "foglab/fed.h"
#include "foglab/nn.h"
#include "foglab/stacking.h"
#include "foglab/text_io.h"

namespace foglab::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLockName = ".foglab.lock";

// Exclusive marker file in the output directory, removed on scope exit.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / kLockName) {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f) {
      Fail(ErrorKind::kRuntime,
           "output directory " + dir.string() +
               " is locked by another run (remove " + path_.string() +
               " if it is stale)");
    }
    std::fclose(f);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

std::string UtcTimestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string DatasetSummary(const data::ImuDataset& ds) {
  std::map<int, std::pair<std::size_t, std::size_t>> users;
  for (const auto& s : ds.samples) {
    auto& u = users[s.user_id];
    ++u.first;
    u.second += s.label == 1;
  }
  std::ostringstream out;
  out << "samples = " << ds.size() << "\n";
  out << "positives = " << ds.CountLabel(1) << "\n";
  out << "users = " << users.size() << "\n";
  for (const auto& [id, counts] : users) {
    out << "user." << id << ".samples = " << counts.first << "\n";
    out << "user." << id << ".positives = " << counts.second << "\n";
  }
  return out.str();
}

data::ImuDataset LoadDataset(const config::ExperimentConfig& config) {
  const fs::path path = config.DatasetPath();
  if (!fs::exists(path)) {
    Fail(ErrorKind::kValidation, "dataset " + path.string() +
                                     " not found; run ingest or synth first");
  }
  return data::LoadCsv(path, config::CanonicalSchema());
}

struct CentralData {
  FeatureMatrix x_train;
  std::vector<int> y_train;
  FeatureMatrix x_test;
  std::vector<int> y_test;
};

data::ImuDataset MaybeBalance(const config::ExperimentConfig& config,
                              const data::ImuDataset& ds) {
  if (!config.central.balance_ratio) return ds;
  return data::DownsampleBalance(ds, *config.central.balance_ratio,
                                 config.central.seed);
}

CentralData CentralSplit(const config::ExperimentConfig& config,
                         const data::ImuDataset& ds) {
  const data::SplitSpec spec{config.central.test_fraction, config.central.seed,
                             config.central.stratified};
  const auto [train, test] = data::TrainTestSplit(MaybeBalance(config, ds), spec);
  return {train.ToFeatureMatrix(), train.Labels(), test.ToFeatureMatrix(),
          test.Labels()};
}

eval::MetricsReport Report(std::span<const double> probs,
                           std::span<const int> truth) {
  std::optional<std::span<const double>> scores;
  if (std::count(truth.begin(), truth.end(), 1) > 0 &&
      std::count(truth.begin(), truth.end(), 0) > 0) {
    scores = probs;
  }
  return eval::ClassificationReport(eval::HardLabels(probs), truth, scores);
}

std::string Fixed(double v) { return FormatFixed(v, 4); }

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNumeric:
    case ErrorKind::kAggregation:
    case ErrorKind::kRuntime:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

RunMetadata RunIngest(const config::ExperimentConfig& config,
                      std::ostream& log) {
  if (config.data.sources.empty()) {
    Fail(ErrorKind::kSchema, "config data.sources lists no input file");
  }
  data::ImuDataset merged;
  std::ostringstream report;
  report << "format = foglab-ingest/1\n";
  report << "sources = " << config.data.sources.size() << "\n";
  for (std::size_t i = 0; i < config.data.sources.size(); ++i) {
    const auto& source = config.data.sources[i];
    data::IngestReport r;
    data::ImuDataset ds = data::LoadCsv(source.path, config.data.columns, &r);
    if (source.user_id) {
      for (auto& s : ds.samples) s.user_id = *source.user_id;
    }
    std::istringstream lines(r.ToText());
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind("format", 0) == 0) continue;
      report << "source." << i << "." << line << "\n";
    }
    log << "read " << r.rows_kept << " of " << r.rows_read << " rows from "
        << source.path << "\n";
    merged.samples.insert(merged.samples.end(), ds.samples.begin(),
                          ds.samples.end());
  }
  if (merged.samples.empty()) {
    Fail(ErrorKind::kValidation, "ingest kept no rows");
  }
  merged.provenance = "ingest";
  report << DatasetSummary(merged);
  const fs::path out = config.OutputDir();
  data::WriteCsv(merged, config.DatasetPath(), config::CanonicalSchema());
  WriteFile(out / "ingest_report.txt", report.str());
  log << "wrote " << config.DatasetPath().string() << " (" << merged.size()
      << " samples)\n";
  return {};
}

RunMetadata RunSynth(const config::ExperimentConfig& config,
                     std::ostream& log) {
  const auto& sc = config.data.synthetic;
  const data::ImuDataset ds = data::GenerateSynthetic(sc);
  std::ostringstream report;
  report << "format = foglab-synth/1\n";
  report << "config.users = " << sc.users << "\n";
  report << "config.samples_per_user = " << sc.samples_per_user << "\n";
  report << "config.positive_ratio = " << FormatDouble(sc.positive_ratio)
         << "\n";
  report << "config.separation = " << FormatDouble(sc.separation) << "\n";
  report << "config.user_heterogeneity = "
         << FormatDouble(sc.user_heterogeneity) << "\n";
  report << "config.sample_rate_hz = " << FormatDouble(sc.sample_rate_hz)
         << "\n";
  report << "config.seed = " << sc.seed << "\n";
  report << DatasetSummary(ds);
  data::WriteCsv(ds, config.DatasetPath(), config::CanonicalSchema());
  WriteFile(config.OutputDir() / "synth_report.txt", report.str());
  log << "wrote " << config.DatasetPath().string() << " (" << ds.size()
      << " samples, " << sc.users << " users)\n";
  return {};
}

RunMetadata RunTrainCentral(const config::ExperimentConfig& config,
                            std::ostream& log) {
  const CentralData d = CentralSplit(config, LoadDataset(config));
  const fs::path out = config.OutputDir();
  fs::create_directories(out / "models");
  fs::create_directories(out / "reports");
  std::ostringstream summary;
  summary << "model,kind,train_accuracy,test_accuracy,test_precision,"
             "test_recall,test_f1,test_auc\n";
  RunMetadata meta;
  for (const auto& name : config.central.models) {
    const auto start = std::chrono::steady_clock::now();
    const auto model =
        stacking::FitLearner(config::ModelConfig(config, name), d.x_train,
                             d.y_train);
    const auto train = Report(stacking::PredictLearner(model, d.x_train),
                              d.y_train);
    const auto test = Report(stacking::PredictLearner(model, d.x_test),
                             d.y_test);
    stacking::SaveLearner(out / "models" / (name + ".model"), model);
    WriteFile(out / "reports" / (name + ".txt"), test.ToKeyValue());
    WriteFile(out / "reports" / (name + "_table.txt"), test.ToText());
    WriteFile(out / "reports" / (name + "_confusion.csv"),
              eval::FormatConfusion(test.cm));
    summary << name << "," << stacking::LearnerKindName(model) << ","
            << FormatDouble(train.accuracy) << ","
            << FormatDouble(test.accuracy) << ","
            << FormatDouble(test.per_class[1].precision) << ","
            << FormatDouble(test.per_class[1].recall) << ","
            << FormatDouble(test.per_class[1].f1) << ","
            << (test.auc ? FormatDouble(*test.auc) : "") << "\n";
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    meta["fit_seconds." + name] = FormatDouble(seconds);
    log << name << ": train " << Fixed(train.accuracy) << " test "
        << Fixed(test.accuracy) << "\n";
  }
  WriteFile(out / "central_summary.csv", summary.str());
  return meta;
}

RunMetadata RunNestedCv(const config::ExperimentConfig& config,
                        std::ostream& log) {
  const data::ImuDataset ds = MaybeBalance(config, LoadDataset(config));
  const FeatureMatrix x = ds.ToFeatureMatrix();
  const std::vector<int> y = ds.Labels();
  const auto& grid = config.nested_cv.grid;
  const eval::FitPredict fit_predict =
      [&](std::size_t g, const FeatureMatrix& xtr, std::span<const int> ytr,
          const FeatureMatrix& xte) {
        return stacking::PredictLearner(stacking::FitLearner(grid[g], xtr, ytr),
                                        xte);
      };
  const eval::NestedCvConfig cv{config.nested_cv.outer_k,
                                config.nested_cv.inner_k,
                                config.nested_cv.seed};
  const auto result = eval::NestedCv(fit_predict, grid.size(), x, y, cv);
  std::ostringstream report;
  report << "format = foglab-nested-cv/1\n";
  report << "model = " << config.nested_cv.model << "\n";
  report << "grid_size = " << grid.size() << "\n";
  report << "outer_k = " << cv.outer_k << "\n";
  report << "inner_k = " << cv.inner_k << "\n";
  report << "samples = " << ds.size() << "\n";
  report << "mean_accuracy = " << FormatDouble(result.mean) << "\n";
  report << "std_accuracy = " << FormatDouble(result.std) << "\n";
  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    const auto& fold = result.folds[f];
    report << "fold." << f + 1 << ".test_size = " << fold.test_size << "\n";
    for (std::size_t g = 0; g < fold.inner_accuracy.size(); ++g) {
      report << "fold." << f + 1 << ".inner_accuracy." << g << " = "
             << FormatDouble(fold.inner_accuracy[g]) << "\n";
    }
  }
  WriteFile(config.OutputDir() / "nested_cv.csv", result.ToCsv());
  WriteFile(config.OutputDir() / "nested_cv_report.txt", report.str());
  log << "nested cv mean " << Fixed(result.mean) << " std "
      << Fixed(result.std) << "\n";
  return {};
}

RunMetadata RunExplain(const config::ExperimentConfig& config,
                       std::ostream& log) {
  const fs::path model_path = config.ModelFile();
  if (!fs::exists(model_path)) {
    Fail(ErrorKind::kValidation, "model file " + model_path.string() +
                                     " not found; run train-central first");
  }
  const auto model = stacking::LoadLearner(model_path);
  const CentralData d = CentralSplit(config, LoadDataset(config));
  if (d.x_test.cols() != data::kNumFeatures) {
    Fail(ErrorKind::kValidation, "dataset width differs from the model");
  }
  const FeatureMatrix rows =
      explain::SampleRows(d.x_test, config.explain.max_rows, config.explain.seed);
  const FeatureMatrix background = explain::SampleRows(
      d.x_train, config.explain.background_rows, config.explain.seed + 1);
  const explain::BatchPredict predict = [&](const FeatureMatrix& x) {
    return stacking::PredictLearner(model, x);
  };
  const auto attributions = explain::ExplainRows(predict, rows, background);
  const auto summary = explain::Summarize(attributions);
  const std::vector<std::string> names(data::FeatureNames().begin(),
                                       data::FeatureNames().end());
  double max_gap = 0.0;
  for (const auto& a : attributions) {
    double total = a.base_value;
    for (double p : a.phi) total += p;
    max_gap = std::max(max_gap, std::abs(total - a.prediction));
  }
  std::ostringstream report;
  report << "format = foglab-explain/1\n";
  report << "model_kind = " << stacking::LearnerKindName(model) << "\n";
  report << "rows = " << rows.rows() << "\n";
  report << "background_rows = " << background.rows() << "\n";
  report << "base_value = "
         << FormatDouble(attributions.empty() ? 0.0
                                              : attributions[0].base_value)
         << "\n";
  report << "max_efficiency_gap = " << FormatDouble(max_gap) << "\n";
  for (std::size_t r = 0; r < summary.ranking.size(); ++r) {
    const std::size_t f = summary.ranking[r];
    report << "rank." << r + 1 << " = " << names[f] << "\n";
    report << "mean_abs." << names[f] << " = "
           << FormatDouble(summary.mean_abs[f]) << "\n";
  }
  WriteFile(config.OutputDir() / "shap_bar.csv", summary.BarCsv(names));
  WriteFile(config.OutputDir() / "shap_beeswarm.csv",
            summary.BeeswarmCsv(names));
  WriteFile(config.OutputDir() / "explain_report.txt", report.str());
  log << "explained " << rows.rows() << " rows; top feature "
      << names[summary.ranking.front()] << "\n";
  return {};
}

RunMetadata RunFederate(const config::ExperimentConfig& config,
                        std::ostream& log) {
  const auto& fc = config.federated;
  const fed::Federation federation = fed::Prepare(LoadDataset(config), fc);
  const fs::path dir = config.OutputDir() / "federated";
  fs::create_directories(dir / "checkpoints");

  std::ostringstream prep;
  prep << "format = foglab-federation/1\n";
  prep << "clients = " << federation.clients.size() << "\n";
  for (const auto& c : federation.clients) {
    prep << "client." << c.user_id() << ".n_k = " << c.n_k() << "\n";
    prep << "client." << c.user_id()
         << ".local_test = " << c.local_test_size() << "\n";
  }
  prep << "global_test = " << federation.test.size() << "\n";
  prep << "global_test_positives = " << federation.test.CountLabel(1) << "\n";
  for (const auto& [user, count] : federation.excluded) {
    prep << "excluded." << user << " = " << count << "\n";
  }
  for (std::size_t i = 0; i < federation.notes.size(); ++i) {
    prep << "note." << i << " = " << federation.notes[i] << "\n";
  }
  for (std::size_t c = 0; c < federation.scaler.mean.size(); ++c) {
    prep << "scaler." << c << ".mean = "
         << FormatDouble(federation.scaler.mean[c]) << "\n";
    prep << "scaler." << c << ".scale = "
         << FormatDouble(federation.scaler.scale[c]) << "\n";
  }
  WriteFile(dir / "federation.txt", prep.str());
  for (const auto& note : federation.notes) log << note << "\n";

  const fs::path round_log = dir / "round_log.jsonl";
  WriteFile(round_log, "");
  const nn::Architecture arch = fc.Arch();
  RunMetadata meta;
  const auto result = fed::RunRounds(
      federation.clients, federation.test, fc,
      [&](const fed::RoundLog& r, const nn::ModelWeights& global) {
        std::ofstream append(round_log, std::ios::app | std::ios::binary);
        append << fed::RoundRecord(r);
        if (!append) Fail(ErrorKind::kRuntime, "cannot append to round log");
        char name[32];
        std::snprintf(name, sizeof name, "round_%03zu", r.round);
        nn::SaveWeights(dir / "checkpoints" / (std::string(name) + ".weights"), arch,
                        global);
        meta["seconds." + std::string(name)] =
            FormatDouble(r.seconds);
        log << "round " << r.round << ": global accuracy "
            << Fixed(r.global.accuracy) << " f1 "
            << Fixed(r.global.per_class[1].f1) << "\n";
      });
  const auto summary = fed::SummarizeUsers(result.rounds);
  nn::SaveWeights(dir / "global_final.weights", arch, result.global);
  WriteFile(dir / "global_trend.csv", fed::TrendCsv(result.rounds));
  WriteFile(dir / "global_report.txt", result.rounds.back().global.ToKeyValue());
  WriteFile(dir / "user_summary.csv", summary.UsersCsv());
  WriteFile(dir / "user_summary.txt", summary.ToKeyValue());
  log << "users: mean accuracy " << Fixed(summary.mean_accuracy)
      << " mean f1 " << Fixed(summary.mean_f1) << " avg epochs "
      << FormatFixed(summary.avg_epochs, 1) << "\n";
  return meta;
}

void RunCommand(const std::string& command,
                const config::ExperimentConfig& config, std::ostream& log) {
  using Fn = RunMetadata (*)(const config::ExperimentConfig&, std::ostream&);
  static const std::map<std::string, Fn> commands{
      {"ingest", RunIngest},          {"synth", RunSynth},
      {"train-central", RunTrainCentral}, {"nested-cv", RunNestedCv},
      {"explain", RunExplain},        {"federate", RunFederate}};
  const auto it = commands.find(command);
  if (it == commands.end()) {
    Fail(ErrorKind::kArgument, "unknown command '" + command + "'");
  }
  const fs::path out = config.OutputDir();
  fs::create_directories(out);
  DirectoryLock lock(out);
  WriteFile(out / ("resolved_config." + command + ".json"),
            config::ResolvedJson(config));
  const auto wall_start = std::chrono::system_clock::now();
  const auto start = std::chrono::steady_clock::now();
  const RunMetadata extra = it->second(config, log);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  nlohmann::ordered_json meta;
  meta["command"] = command;
  meta["started_at"] = UtcTimestamp(wall_start);
  meta["finished_at"] = UtcTimestamp(std::chrono::system_clock::now());
  meta["wall_seconds"] = seconds;
  for (const auto& [key, value] : extra) meta[key] = value;
  WriteFile(out / ("run_metadata." + command + ".json"), meta.dump(2) + "\n");
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"foglab: freezing-of-gait experiment runner"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::string model_file;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"ingest", "Load CSV sources into the canonical dataset"},
      {"synth", "Generate the synthetic multi-user dataset"},
      {"train-central", "Train and evaluate the centralized models"},
      {"nested-cv", "Nested cross-validation of one model"},
      {"explain", "Exact Shapley attributions for a saved model"},
      {"federate", "Federated training simulation"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "Experiment config (JSON)")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides,
                    "Override a scalar config key, e.g. federated.rounds=3");
    sub->add_option("-o,--output", output_dir, "Output directory");
    if (name == "explain") {
      sub->add_option("-m,--model", model_file, "Model file to explain");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (!output_dir.empty()) {
      overrides.push_back("output_dir=" + fs::absolute(output_dir).string());
    }
    if (!model_file.empty()) {
      overrides.push_back("explain.model_file=" +
                          fs::absolute(model_file).string());
    }
    const config::ExperimentConfig config =
        config_path.empty() ? config::ParseConfig("{}", overrides)
                            : config::LoadConfig(config_path, overrides);
    RunCommand(command, config, out);
  } catch (const Error& e) {
    err << "foglab " << command << ": " << ErrorKindName(e.kind())
        << " error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "foglab " << command << ": runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace foglab::cli
