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

#include "steersim/models.hpp"

#include <algorithm>
#include <cmath>

#include "steersim/error.hpp"

namespace steersim {

void PhysicsModel::validate() const {
  if (kind == ModelKind::UnitaryQM) return;
  if (!(kappa_model > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa_model must be positive (may be infinite)");
  if (!(d_tau >= 0.0) || std::isinf(d_tau)) throw Error(ErrorCode::InvalidArgument, "d_tau must be a length >= 0");
  if (!(pre_collapse_gamma >= 0.0 && pre_collapse_gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "pre_collapse_gamma must lie in [0, 1]");
  }
}

bool PhysicsModel::collapse_applies(const Layout& layout, Scheme scheme) const {
  if (kind == ModelKind::UnitaryQM) return false;
  return collapse_arrival_vs_detection(layout, scheme, kappa_model, d_tau);
}

double ReducedPolarizationState::visibility() const noexcept {
  const double trace = hh + vv;
  return trace > 0.0 ? std::min(1.0, 2.0 * std::abs(hv) / trace) : 0.0;
}

ReducedPolarizationState bob_polarization_state(const PhysicsModel& model, const PolarizationEntangledSource& src,
                                                bool collapse_applies) {
  src.validate();
  ReducedPolarizationState rho;
  if (model.kind == ModelKind::UnitaryQM || collapse_applies) {
    // Tracing Alice out of a maximally entangled pair, or Alice's projection
    // having already removed one component: no H/V coherence survives on
    // average.
    return rho;
  }
  rho.hv = 0.5 * model.pre_collapse_gamma;
  return rho;
}

std::pair<double, double> branch_weights(const PhysicsModel& model, double p) {
  if (model.kind == ModelKind::UnitaryQM || model.weighting == Weighting::Probability) return {p, 1.0 - p};
  if (p <= 0.0) return {0.0, 1.0};
  if (p >= 1.0) return {1.0, 0.0};
  return {0.5, 0.5};
}

InterferencePattern cosine_pattern(double visibility, double center_frequency, std::span<const double> delays) {
  InterferencePattern p;
  p.delays.assign(delays.begin(), delays.end());
  p.values.resize(delays.size());
  p.errors.assign(delays.size(), 0.0);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    p.values[k] = 0.5 * (1.0 + visibility * std::cos(center_frequency * delays[k]));
  }
  p.validate_probability();
  return p;
}

namespace {

Spectrum bob_branch(const EnergyEntangledSource& src, const FilterProfile& filter, Branch branch) {
  return src.is_cw() ? conditional_bob_spectrum(src, filter, branch)
                     : conditional_bob_spectrum_joint(src, filter, branch);
}

}  // namespace

Prediction predict_energy_scheme(const PhysicsModel& model, const EnergyEntangledSource& src,
                                 const FilterProfile& filter, const Layout& layout, std::span<const double> delays,
                                 bool coincidence_channel) {
  model.validate();
  layout.validate();
  Prediction out;
  out.ordering = ordering(layout, Scheme::Energy);
  out.collapse_applies = model.collapse_applies(layout, Scheme::Energy);

  const auto marginal = marginal_spectrum(src, Wing::B);
  const auto transmitted = bob_branch(src, filter, Branch::Transmitted);
  const auto absorbed = bob_branch(src, filter, Branch::Absorbed);
  const double p = std::clamp(transmitted.total_weight() / marginal.total_weight(), 0.0, 1.0);
  out.transmit_probability = p;
  out.branch_patterns = BranchPatterns{fringe_rate(transmitted, delays), fringe_rate(absorbed, delays)};

  if (!out.collapse_applies) {
    out.singles_bob = fringe_pattern(marginal, delays);
  } else if (model.weighting == Weighting::Probability) {
    // Probability-weighted branch addition: p * P_t + (1-p) * P_a, i.e. the
    // sum of the two rate-form patterns over the unit total weight.
    out.singles_bob = out.branch_patterns->transmitted;
    for (std::size_t k = 0; k < delays.size(); ++k) {
      out.singles_bob.values[k] =
          std::clamp(out.branch_patterns->transmitted.values[k] + out.branch_patterns->absorbed.values[k], 0.0, 1.0);
    }
  } else {
    const auto [wt, wa] = branch_weights(model, p);
    out.singles_bob.delays.assign(delays.begin(), delays.end());
    out.singles_bob.values.assign(delays.size(), 0.0);
    out.singles_bob.errors.assign(delays.size(), 0.0);
    for (auto [weight, spectrum] : {std::pair{wt, &transmitted}, std::pair{wa, &absorbed}}) {
      if (weight == 0.0) continue;
      const auto pattern = fringe_pattern(*spectrum, delays);
      for (std::size_t k = 0; k < delays.size(); ++k) out.singles_bob.values[k] += weight * pattern.values[k];
    }
    for (double& v : out.singles_bob.values) v = std::clamp(v, 0.0, 1.0);
  }

  if (coincidence_channel) out.coincidence = fringe_pattern(transmitted, delays);
  return out;
}

InterferencePattern predict_coincidence_kc(const EnergyEntangledSource& src, const FilterProfile& filter,
                                           std::span<const double> delays) {
  const auto transmitted = bob_branch(src, filter, Branch::Transmitted);
  if (transmitted.is_empty()) {
    throw Error(ErrorCode::EmptySpectrum, "Alice's filter blocks every photon; no coincidences are possible");
  }
  return fringe_pattern(transmitted, delays);
}

Prediction predict_polarization_scheme(const PhysicsModel& model, const PolarizationEntangledSource& src,
                                       const Layout& layout, std::span<const double> delays) {
  model.validate();
  layout.validate();
  Prediction out;
  out.ordering = ordering(layout, Scheme::Polarization);
  out.collapse_applies = model.collapse_applies(layout, Scheme::Polarization);
  const double v = bob_polarization_state(model, src, out.collapse_applies).visibility();
  out.visibility = v;
  out.singles_bob = cosine_pattern(v, src.center_frequency, delays);
  return out;
}

const char* to_string(ModelKind kind) noexcept {
  return kind == ModelKind::UnitaryQM ? "unitary_qm" : "finite_speed_collapse";
}

const char* to_string(Weighting weighting) noexcept {
  return weighting == Weighting::Probability ? "probability" : "equal";
}

}  // namespace steersim
