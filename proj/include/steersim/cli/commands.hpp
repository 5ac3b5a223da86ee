// Copyright 2026 The steersim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "steersim/analysis.hpp"
#include "steersim/cli/config.hpp"

namespace steersim::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPhysics = 3;

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  bool diagnostic = false;
};

void cmd_predict(const ExperimentConfig& config, const CommandOptions& options);
void cmd_simulate(const ExperimentConfig& config, const CommandOptions& options);
void cmd_scan(const ExperimentConfig& config, const CommandOptions& options);
void cmd_power(const ExperimentConfig& config, const CommandOptions& options);

// Simulate-and-classify over the configured scan grid. Each scan point runs
// with its own seed derived from the run seed and the point's index.
struct ScanRun {
  ThresholdScanResult result;
  InterferencePattern reference_unitary;
  InterferencePattern reference_collapsed;
};
ScanRun run_scan(const ExperimentConfig& config, unsigned threads = 1);

nlohmann::json scan_to_json(const ThresholdScanResult& result);

// Parses argv, runs the subcommand and maps failures to exit codes. Errors
// go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace steersim::cli
