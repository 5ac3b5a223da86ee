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

// The two predictors compared by the simulator.
//
// UnitaryQM: Bob's singles depend only on the B marginal, whatever Alice
// does. FiniteSpeedCollapse: when the collapse front generated at Alice's
// element reaches Bob first (and Alice sits within the threshold distance),
// Bob's pattern is the sum of the two branch patterns, weighted either by
// the branch probabilities or equally.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>

#include "steersim/biphoton.hpp"
#include "steersim/geometry.hpp"
#include "steersim/spectra.hpp"

namespace steersim {

enum class ModelKind : std::uint8_t { UnitaryQM, FiniteSpeedCollapse };
enum class Weighting : std::uint8_t { Probability, Equal };

struct PhysicsModel {
  ModelKind kind = ModelKind::UnitaryQM;
  double kappa_model = kInfiniteSpeed;  // m/s
  double d_tau = 0.0;                   // m
  Weighting weighting = Weighting::Equal;
  double pre_collapse_gamma = 1.0;

  static PhysicsModel unitary() { return {}; }
  static PhysicsModel collapse(double kappa_model, double d_tau, Weighting weighting = Weighting::Equal,
                               double pre_collapse_gamma = 1.0) {
    return {ModelKind::FiniteSpeedCollapse, kappa_model, d_tau, weighting, pre_collapse_gamma};
  }

  void validate() const;
  // Always false for UnitaryQM.
  bool collapse_applies(const Layout& layout, Scheme scheme) const;
};

// Rate-form branch patterns: transmitted + absorbed = unconditioned rate.
struct BranchPatterns {
  InterferencePattern transmitted;
  InterferencePattern absorbed;
};

struct Prediction {
  InterferencePattern singles_bob;
  std::optional<InterferencePattern> coincidence;
  std::optional<BranchPatterns> branch_patterns;
  OrderingVerdict ordering{Scheme::Energy, Ordering::Simultaneous};
  bool collapse_applies = false;
  std::optional<double> transmit_probability;  // energy scheme
  std::optional<double> visibility;            // polarization scheme
};

// Bob's reduced polarization state in the H/V basis.
struct ReducedPolarizationState {
  double hh = 0.5;
  double vv = 0.5;
  std::complex<double> hv{0.0, 0.0};

  // Visibility of the recombining two-path interferometer: 2|rho_HV| / tr rho.
  double visibility() const noexcept;
};

ReducedPolarizationState bob_polarization_state(const PhysicsModel& model, const PolarizationEntangledSource& src,
                                                bool collapse_applies);

// Weights of the (transmitted, absorbed) probability-form branch patterns.
// Equal weighting spreads the weight evenly over branches that can occur.
std::pair<double, double> branch_weights(const PhysicsModel& model, double transmit_probability);

Prediction predict_energy_scheme(const PhysicsModel& model, const EnergyEntangledSource& src,
                                 const FilterProfile& filter, const Layout& layout, std::span<const double> delays,
                                 bool coincidence_channel = false);

InterferencePattern predict_coincidence_kc(const EnergyEntangledSource& src, const FilterProfile& filter,
                                           std::span<const double> delays);

Prediction predict_polarization_scheme(const PhysicsModel& model, const PolarizationEntangledSource& src,
                                       const Layout& layout, std::span<const double> delays);

// 1/2 (1 + V cos(w t)) at each delay.
InterferencePattern cosine_pattern(double visibility, double center_frequency, std::span<const double> delays);

const char* to_string(ModelKind kind) noexcept;
const char* to_string(Weighting weighting) noexcept;

}  // namespace steersim
