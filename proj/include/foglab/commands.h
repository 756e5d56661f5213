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

#ifndef FOGLAB_COMMANDS_H_
#define FOGLAB_COMMANDS_H_

#include <iosfwd>
#include <map>
#include <string>

#include "foglab/config.h"
#include "foglab/error.h"

namespace foglab::cli {

// 0 success, 2 configuration or validation problem, 3 runtime or numeric
// failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

int ExitCodeFor(ErrorKind kind);

// Extra run-metadata entries a command reports (wall-clock values only).
using RunMetadata = std::map<std::string, std::string>;

// Each command writes its data files under config.output_dir and returns
// wall-clock facts for the run-metadata file. Progress goes to `log`.
RunMetadata RunIngest(const config::ExperimentConfig& config, std::ostream& log);
RunMetadata RunSynth(const config::ExperimentConfig& config, std::ostream& log);
RunMetadata RunTrainCentral(const config::ExperimentConfig& config,
                            std::ostream& log);
RunMetadata RunNestedCv(const config::ExperimentConfig& config,
                        std::ostream& log);
RunMetadata RunExplain(const config::ExperimentConfig& config,
                       std::ostream& log);
RunMetadata RunFederate(const config::ExperimentConfig& config,
                        std::ostream& log);

// Takes the output-directory lock, archives the resolved config as
// resolved_config.<command>.json, runs the command and writes
// run_metadata.<command>.json. Throws foglab::Error.
void RunCommand(const std::string& command,
                const config::ExperimentConfig& config, std::ostream& log);

// Command-line entry point:
//   foglab <ingest|synth|train-central|nested-cv|explain|federate>
//          [--config FILE] [--set KEY=VALUE]... [--output DIR] [--model FILE]
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace foglab::cli

#endif  // FOGLAB_COMMANDS_H_
