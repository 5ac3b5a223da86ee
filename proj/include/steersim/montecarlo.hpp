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

// Event-level simulation: pair emission, per-event branch resolution,
// detector thinning, jitter, dark counts, coincidence pairing and heralding.
//
// Every pair draws from its own counter-based stream addressed by
// (seed, pair id), emission times and dark counts from fixed per-purpose
// streams. The log therefore does not depend on how pairs are split into
// batches or how many threads process them.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "steersim/biphoton.hpp"
#include "steersim/geometry.hpp"
#include "steersim/models.hpp"
#include "steersim/spectra.hpp"

namespace steersim {

enum class RunMode : std::uint8_t { Cw, Pulsed };
enum class CoincidenceMode : std::uint8_t { GreedyNearest, AllPairs };

struct DelayStep {
  double delay = 0.0;  // s, interferometer delay
  double dwell = 0.0;  // s, time spent at this delay
};

struct RunConfig {
  RunMode mode = RunMode::Cw;
  double pair_rate = 0.0;        // pairs/s (cw)
  double pairs_per_pulse = 0.0;  // mean pairs per pulse (pulsed)
  double pulse_rate = 0.0;       // Hz (pulsed)
  double duration = 0.0;         // s; must match the schedule when both are given
  double detector_efficiency_a = 1.0;
  double detector_efficiency_b = 1.0;
  double dark_rate_a = 0.0;  // counts/s
  double dark_rate_b = 0.0;  // counts/s, per Bob output-port detector
  double timing_jitter_sigma = 0.0;
  double coincidence_window = 0.0;
  double herald_gate_width = 0.0;
  std::vector<DelayStep> delay_schedule;
  std::uint64_t seed = 0;
  CoincidenceMode coincidence_mode = CoincidenceMode::GreedyNearest;

  // Throws ConfigInvalid. coincidence_on additionally requires a positive
  // coincidence window.
  void validate(bool coincidence_on = false) const;
  // The schedule actually run: the configured one, or a single zero-delay
  // step covering `duration`.
  std::vector<DelayStep> effective_schedule() const;
  double total_duration() const;
  // Mean pair emission rate in pairs/s for either mode.
  double mean_pair_rate() const noexcept;
};

// Uniform schedule of `delays` with a common dwell time.
std::vector<DelayStep> uniform_schedule(std::span<const double> delays, double dwell);

enum class Outcome : std::uint8_t { PortPlus, PortMinus, AliceTransmitted, AliceAbsorbed, Herald };
enum class HiddenBranch : std::uint8_t { None, Transmitted, Absorbed };

inline constexpr std::int64_t kNoPair = -1;

struct EventRecord {
  std::int64_t pair_id = kNoPair;
  Wing wing = Wing::A;
  double timestamp = 0.0;
  Outcome outcome = Outcome::PortPlus;
  // Diagnostic only: which branch fixed Bob's state under a collapse. Never
  // read by analysis code and stripped from exported observables.
  HiddenBranch hidden_branch = HiddenBranch::None;

  bool is_bob_detection() const noexcept {
    return wing == Wing::B && (outcome == Outcome::PortPlus || outcome == Outcome::PortMinus);
  }
  bool is_alice_detection() const noexcept { return wing == Wing::A; }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventLog {
  std::vector<EventRecord> records;  // sorted by timestamp
  RunConfig config_echo;
  PhysicsModel model_echo;
  Scheme scheme = Scheme::Energy;
};

struct SimulationSetup {
  Scheme scheme = Scheme::Energy;
  PhysicsModel model;
  std::optional<EnergyEntangledSource> energy_source;
  std::optional<FilterProfile> filter;  // energy scheme; absent means no filter
  std::optional<PolarizationEntangledSource> polarization_source;
  Layout layout;
};

struct SimulationOptions {
  unsigned threads = 1;
  // Number of pair batches; 0 means one per thread.
  std::size_t batches = 0;
};

// Throws ConfigInvalid for bad run parameters and IncompatibleScheme when
// the setup lacks the source the scheme needs.
EventLog simulate(const SimulationSetup& setup, const RunConfig& run, SimulationOptions options = {});

using CoincidencePair = std::pair<EventRecord, EventRecord>;  // (A, B)

// Pairs Bob detections with Alice detections whose timestamp minus
// `alice_offset` lies within +/- window/2. Greedy mode walks Bob's detections
// in time order and takes the nearest unused Alice detection; all-pairs mode
// counts every combination in the window.
std::vector<CoincidencePair> coincidence_pairs(const EventLog& log, double window,
                                               CoincidenceMode mode = CoincidenceMode::GreedyNearest,
                                               double alice_offset = 0.0);

// Alice's arrival time minus Bob's for photons of one pair: the delay a
// coincidence circuit compensates.
double arrival_offset(const SimulationSetup& setup);

// Keeps Bob detections strictly within gate_width/2 of a herald; Alice and
// herald records pass through. Throws NoHeralds.
EventLog herald_gate(const EventLog& log, double gate_width);

struct BinnedPattern {
  InterferencePattern pattern;    // counts / dwell, Poisson errors
  std::vector<std::uint64_t> counts;
  std::vector<bool> empty_bins;
};

// Bob's port-plus detection rate per schedule step, binned by timestamp.
BinnedPattern bin_pattern(const EventLog& log, std::span<const DelayStep> schedule);
// Same for the Bob side of coincidence pairs.
BinnedPattern bin_pattern(std::span<const CoincidencePair> pairs, std::span<const DelayStep> schedule);

struct SignalToNoise {
  std::uint64_t signal = 0;  // Bob detections carrying a pair id
  std::uint64_t noise = 0;   // Bob dark counts
  double ratio = 0.0;        // signal / noise, +inf when noise = 0
};
SignalToNoise bob_signal_to_noise(const EventLog& log);

// Expected port-plus rate for a probability-form prediction:
// mean pair rate * efficiency_b * P + dark_rate_b.
InterferencePattern expected_rate(const InterferencePattern& probability, const RunConfig& run);

const char* to_string(Outcome outcome) noexcept;
const char* to_string(HiddenBranch branch) noexcept;

}  // namespace steersim
