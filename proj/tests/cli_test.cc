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

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "foglab/data.h"
#include "foglab/eval.h"
#include "foglab/stacking.h"
#include "foglab/text_io.h"
#include "gtest/gtest.h"

namespace foglab::cli {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "foglab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "foglab_cli_test" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  // Small, fast experiment; `extra` holds more top-level JSON members.
  fs::path WriteConfig(const std::string& name, const std::string& extra = "") {
    const fs::path path = dir_ / name;
    WriteFile(path, R"({
      "output_dir": "out",
      "data": {"synthetic": {"users": 3, "samples_per_user": 300,
                             "separation": 6.0}},
      "models": {"stack": {"cv_folds": 3}},
      "federated": {"rounds": 2, "window_len": 8, "stride": 4, "units": 4,
                    "filters": 4, "local": {"max_epochs": 2}})" +
                        extra + "}");
    return path;
  }

  fs::path dir_;
};

std::string Read(const fs::path& p) { return ReadFile(p); }

std::size_t Lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(ExitCodeTest, ConfigAndValidationExitTwoRuntimeExitsThree) {
  for (auto k : {ErrorKind::kSchema, ErrorKind::kParse, ErrorKind::kValidation,
                 ErrorKind::kArgument, ErrorKind::kSpec,
                 ErrorKind::kUnsupported}) {
    EXPECT_EQ(ExitCodeFor(k), 2);
  }
  for (auto k : {ErrorKind::kNumeric, ErrorKind::kAggregation,
                 ErrorKind::kRuntime}) {
    EXPECT_EQ(ExitCodeFor(k), 3);
  }
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"train"}).code, 2);
  EXPECT_EQ(Cli({"synth", "--bogus"}).code, 2);
  EXPECT_EQ(Cli({"synth", "--config", (dir_ / "missing.json").string()}).code,
            2);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST_F(CliTest, UnknownConfigKeyExitsTwo) {
  const auto cfg = WriteConfig("c.json", R"(, "federated_rounds": 3)");
  const auto r = Cli({"synth", "-c", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("federated_rounds"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "out" / "dataset.csv"));
}

TEST_F(CliTest, SynthWritesTheFixtureAndResolvedConfig) {
  const auto cfg = WriteConfig("c.json");
  const auto r = Cli({"synth", "-c", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path out = dir_ / "out";
  const auto ds = data::LoadCsv(out / "dataset.csv", config::CanonicalSchema());
  EXPECT_EQ(ds.size(), 900u);
  const std::string report = Read(out / "synth_report.txt");
  EXPECT_NE(report.find("users = 3\n"), std::string::npos);
  for (int u = 1; u <= 3; ++u) {
    EXPECT_NE(report.find("user." + std::to_string(u) + ".samples = 300\n"),
              std::string::npos);
  }
  // The archived config parses back to the run's configuration.
  const std::string resolved = Read(out / "resolved_config.synth.json");
  EXPECT_EQ(config::ResolvedJson(config::ParseConfig(resolved)), resolved);
  EXPECT_TRUE(fs::exists(out / "run_metadata.synth.json"));
  EXPECT_FALSE(fs::exists(out / ".foglab.lock"));
}

TEST_F(CliTest, IngestReportsRowCounts) {
  data::SyntheticConfig sc;
  sc.users = 1;
  sc.samples_per_user = 50;
  const auto ds = data::GenerateSynthetic(sc);
  data::WriteCsv(ds, dir_ / "user1.csv", data::ColumnSchema{});
  std::string text = data::FormatCsv(ds, data::ColumnSchema{});
  text += ",,,,,,,\n";  // one row with empty cells
  WriteFile(dir_ / "user2.csv", text);
  const auto cfg = WriteConfig(
      "c.json", R"(, "data": {"sources": [{"path": "user1.csv", "user_id": 1},
                               {"path": "user2.csv", "user_id": 2}]})");
  const auto r = Cli({"ingest", "-c", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string report = Read(dir_ / "out" / "ingest_report.txt");
  EXPECT_NE(report.find("source.0.rows_read = 50\n"), std::string::npos);
  EXPECT_NE(report.find("source.1.rows_read = 51\n"), std::string::npos);
  EXPECT_NE(report.find("source.1.rows_kept = 50\n"), std::string::npos);
  EXPECT_NE(report.find("samples = 100\n"), std::string::npos);
  EXPECT_NE(report.find("user.2.samples = 50\n"), std::string::npos);
  const auto merged =
      data::LoadCsv(dir_ / "out" / "dataset.csv", config::CanonicalSchema());
  EXPECT_EQ(merged.size(), 100u);
  EXPECT_EQ(merged.samples.back().user_id, 2);
}

TEST_F(CliTest, IngestMissingColumnExitsTwoNamingIt) {
  WriteFile(dir_ / "bad.csv", "Time [s],ACC ML [g]\n0,1\n");
  const auto cfg =
      WriteConfig("c.json", R"(, "data": {"sources": [{"path": "bad.csv"}]})");
  const auto r = Cli({"ingest", "-c", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ACC AP [g]"), std::string::npos) << r.err;
}

TEST_F(CliTest, CommandsNeedTheDataset) {
  const auto cfg = WriteConfig("c.json");
  const auto r = Cli({"train-central", "-c", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("synth"), std::string::npos) << r.err;
}

TEST_F(CliTest, LockedOutputDirectoryExitsThree) {
  const auto cfg = WriteConfig("c.json");
  fs::create_directories(dir_ / "out");
  WriteFile(dir_ / "out" / ".foglab.lock", "");
  const auto r = Cli({"synth", "-c", cfg.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("locked"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "out" / ".foglab.lock"));
}

TEST_F(CliTest, TrainCentralReportsEveryModelAndIsReproducible) {
  const auto cfg = WriteConfig("c.json");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  const auto r = Cli({"train-central", "-c", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path out = dir_ / "out";
  const std::string summary = Read(out / "central_summary.csv");
  EXPECT_EQ(Lines(summary), 5u);  // header + 4 models
  std::istringstream rows(summary);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    const auto cells = SplitFields(line, ',');
    EXPECT_TRUE(fs::exists(out / "models" / (std::string(cells[0]) + ".model")));
    if (cells[0] == "stack") EXPECT_EQ(cells[3], "1");
  }
  EXPECT_EQ(Read(out / "reports" / "stack_confusion.csv").substr(0, 13),
            "truth\\pred,0,");
  const std::string first = Read(out / "reports" / "stack.txt");
  ASSERT_EQ(Cli({"train-central", "-c", cfg.string()}).code, 0);
  EXPECT_EQ(Read(out / "central_summary.csv"), summary);
  EXPECT_EQ(Read(out / "reports" / "stack.txt"), first);
}

TEST_F(CliTest, OverridesReachTheCommand) {
  const auto cfg = WriteConfig("c.json");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  const auto r = Cli({"train-central", "-c", cfg.string(), "--set",
                      "central.models=gbm", "-o",
                      (dir_ / "other").string()});
  EXPECT_EQ(r.code, 2);  // a list key cannot be set from the command line
  const auto ok =
      Cli({"synth", "-c", cfg.string(), "--set", "data.synthetic.users=2",
           "-o", (dir_ / "other").string()});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(data::LoadCsv(dir_ / "other" / "dataset.csv",
                          config::CanonicalSchema())
                .size(),
            600u);
}

TEST_F(CliTest, NestedCvSinglePointGridMatchesPlainCv) {
  const auto cfg = WriteConfig(
      "c.json", R"(, "nested_cv": {"model": "gbm", "outer_k": 5},
                   "models": {"gbm": {"iterations": 5}}, "seed": 3)");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  const auto r = Cli({"nested-cv", "-c", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = Read(dir_ / "out" / "nested_cv.csv");
  EXPECT_EQ(Lines(csv), 1u + 5u + 2u);

  // Plain stratified 5-fold CV with the same folds.
  const auto ds = data::LoadCsv(dir_ / "out" / "dataset.csv",
                                config::CanonicalSchema());
  const auto x = ds.ToFeatureMatrix();
  const auto y = ds.Labels();
  trees::GbmConfig gbm;
  gbm.iterations = 5;
  gbm.seed = 3;
  std::ostringstream expected;
  expected << "fold,accuracy,chosen\n";
  std::vector<double> acc;
  const auto folds = data::KFoldIndices(x.rows(), 5, y, 3);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto ytr = SelectItems<int>(y, folds[f].train);
    const auto yte = SelectItems<int>(y, folds[f].test);
    const auto model = trees::FitGbm(x.SelectRows(folds[f].train), ytr, gbm);
    const auto pred = eval::HardLabels(
        trees::PredictProba(model, x.SelectRows(folds[f].test)));
    acc.push_back(eval::Accuracy(eval::Confusion(pred, yte)));
    expected << f + 1 << "," << FormatDouble(acc.back()) << ",0\n";
  }
  const auto agg = eval::AggregateFolds(acc);
  expected << "mean," << FormatDouble(agg.mean) << ",\n";
  expected << "std," << FormatDouble(agg.std) << ",\n";
  EXPECT_EQ(csv, expected.str());
}

TEST_F(CliTest, ExplainConstantModelGivesZeroAttributions) {
  const auto cfg = WriteConfig("c.json", R"(, "explain": {"max_rows": 5,
                                  "background_rows": 4})");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  stacking::LogisticModel constant;
  constant.weights.assign(data::kNumFeatures, 0.0);
  constant.bias = 0.3;
  stacking::SaveLearner(dir_ / "constant.model", constant);
  const auto r = Cli({"explain", "-c", cfg.string(), "--model",
                      (dir_ / "constant.model").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string bar = Read(dir_ / "out" / "shap_bar.csv");
  EXPECT_EQ(Lines(bar), 1u + data::kNumFeatures);
  std::istringstream rows(bar);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "feature_name,mean_abs_shap");
  while (std::getline(rows, line)) {
    EXPECT_EQ(SplitFields(line, ',')[1], "0") << line;
  }
  EXPECT_EQ(Lines(Read(dir_ / "out" / "shap_beeswarm.csv")),
            1u + 5u * data::kNumFeatures);
}

TEST_F(CliTest, ExplainWithoutAModelExitsTwo) {
  const auto cfg = WriteConfig("c.json");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  EXPECT_EQ(Cli({"explain", "-c", cfg.string()}).code, 2);
}

TEST_F(CliTest, FederateWritesLogsCheckpointsAndSummaries) {
  const auto cfg = WriteConfig("c.json");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  const auto r = Cli({"federate", "-c", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path fed = dir_ / "out" / "federated";
  EXPECT_EQ(Lines(Read(fed / "round_log.jsonl")), 2u);
  EXPECT_TRUE(fs::exists(fed / "checkpoints" / "round_001.weights"));
  EXPECT_TRUE(fs::exists(fed / "checkpoints" / "round_002.weights"));
  EXPECT_EQ(Lines(Read(fed / "global_trend.csv")), 3u);
  EXPECT_EQ(Lines(Read(fed / "user_summary.csv")), 4u);
  const std::string meta = Read(dir_ / "out" / "run_metadata.federate.json");
  EXPECT_NE(meta.find("seconds.round_002"), std::string::npos);
  EXPECT_EQ(Read(fed / "round_log.jsonl").find("seconds"), std::string::npos);

  const std::string trend = Read(fed / "global_trend.csv");
  const std::string weights = Read(fed / "global_final.weights");
  ASSERT_EQ(Cli({"federate", "-c", cfg.string()}).code, 0);
  EXPECT_EQ(Read(fed / "global_trend.csv"), trend);
  EXPECT_EQ(Read(fed / "global_final.weights"), weights);
  EXPECT_EQ(Lines(Read(fed / "round_log.jsonl")), 2u);
}

TEST_F(CliTest, FederateThresholdAboveEveryUserAborts) {
  const auto cfg = WriteConfig("c.json");
  ASSERT_EQ(Cli({"synth", "-c", cfg.string()}).code, 0);
  const auto r = Cli({"federate", "-c", cfg.string(), "--set",
                      "federated.min_samples_per_user=100000"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("100000"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace foglab::cli
