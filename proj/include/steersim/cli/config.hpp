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

// Experiment configuration: one JSON document, units spelled out in the key
// names (rad_s, m, s, hz). Unknown keys are rejected with their JSON path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steersim/biphoton.hpp"
#include "steersim/geometry.hpp"
#include "steersim/models.hpp"
#include "steersim/montecarlo.hpp"
#include "steersim/spectra.hpp"

namespace steersim::cli {

enum class ExperimentScheme : std::uint8_t { KcCoincidence, EnergySingles, Polarization, Heralded };

struct AnalysisOptions {
  double alpha = 0.01;
  double power = 0.99;
  std::vector<double> scan_paths;  // m, sorted
  Weighting reference_weighting = Weighting::Equal;
  double reference_gamma = 1.0;
};

struct ExperimentConfig {
  ExperimentScheme scheme = ExperimentScheme::EnergySingles;
  Scheme base = Scheme::Energy;  // physical scheme behind `scheme`
  std::optional<EnergyEntangledSource> energy_source;
  std::optional<PolarizationEntangledSource> polarization_source;
  std::optional<FilterProfile> filter;
  Layout layout;
  PhysicsModel model;
  std::vector<double> delays;    // analytic prediction delays, s
  std::optional<RunConfig> run;  // schedule resolved against `delays`
  AnalysisOptions analysis;
  nlohmann::json raw;            // the document as given (after overrides)

  bool coincidence_channel() const noexcept { return scheme == ExperimentScheme::KcCoincidence; }
  bool heralded() const noexcept { return scheme == ExperimentScheme::Heralded; }
  SimulationSetup simulation_setup() const;
};

// Throws Error(ConfigInvalid) naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& document);
// Reads and parses a file; JSON syntax errors carry line/column.
nlohmann::json read_config_document(const std::filesystem::path& path);

const char* to_string(ExperimentScheme scheme) noexcept;

}  // namespace steersim::cli
