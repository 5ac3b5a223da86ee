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

// Two-photon sources. The energy-entangled source follows a joint spectral
// density
//
//   J(wA, wB) = exp(-(wA + wB - wp)^2 / 2 sp^2) * exp(-(wA - ws)^2 / 2 spm^2)
//
// with sp the pump bandwidth and spm the phase-matching width. For a CW pump
// (sp = 0) the first factor collapses to the constraint wA + wB = wp.
//
// The A wing lives on the source grid; the B wing lives on the mirrored grid
// wp - w, so B index j pairs with A index n-1-j and conditioning on a filter
// placed in the A arm needs no interpolation.

#include <cstdint>

#include "steersim/rng.hpp"
#include "steersim/spectra.hpp"

namespace steersim {

enum class Wing : std::uint8_t { A, B };
enum class Branch : std::uint8_t { Transmitted, Absorbed };

class EnergyEntangledSource {
 public:
  // Throws InvalidArgument for negative widths, GridTooCoarse when the grid
  // does not resolve the phase-matching width (or a finite pump width), and
  // OutOfRange when either marginal's +/-5 sigma support leaves its grid.
  EnergyEntangledSource(double pump_center, double pump_bandwidth_sigma, double signal_center,
                        double phase_matching_sigma, FrequencyGrid grid);

  // Frequency-degenerate CW source on a grid centred at wp/2 spanning
  // +/- half_span_sigmas phase-matching widths.
  static EnergyEntangledSource degenerate_cw(double pump_center, double phase_matching_sigma,
                                             std::size_t n_points, double half_span_sigmas = 8.0);

  double pump_center() const noexcept { return pump_center_; }
  double pump_bandwidth_sigma() const noexcept { return pump_bandwidth_sigma_; }
  double signal_center() const noexcept { return signal_center_; }
  double phase_matching_sigma() const noexcept { return phase_matching_sigma_; }
  bool is_cw() const noexcept { return pump_bandwidth_sigma_ == 0.0; }

  const FrequencyGrid& grid() const noexcept { return grid_; }
  const FrequencyGrid& grid_b() const noexcept { return grid_b_; }
  const FrequencyGrid& grid_for(Wing wing) const noexcept { return wing == Wing::A ? grid_ : grid_b_; }

  // Expected centre and width of each wing's marginal.
  double center_of(Wing wing) const noexcept;
  double width_of(Wing wing) const noexcept;

 private:
  double pump_center_;
  double pump_bandwidth_sigma_;
  double signal_center_;
  double phase_matching_sigma_;
  FrequencyGrid grid_;
  FrequencyGrid grid_b_;
};

struct PolarizationEntangledSource {
  double coherence_gamma = 0.0;
  double center_frequency = 0.0;  // rad/s, carrier of both photons

  // Throws InvalidArgument unless gamma is in [0, 1] and the frequency is positive.
  void validate() const;
};

struct PairSample {
  double omega_a = 0.0;
  double omega_b = 0.0;
  double emission_time = 0.0;
};

// Marginal spectrum of one wing, normalised to unit total weight. A finite
// pump bandwidth takes the two-dimensional quadrature path.
Spectrum marginal_spectrum(const EnergyEntangledSource& src, Wing wing);

// B spectrum jointly with Alice's filter outcome, in rate form: the two
// branches sum to the B marginal and their weights are the branch
// probabilities. CW pump only (UnsupportedSource otherwise).
Spectrum conditional_bob_spectrum(const EnergyEntangledSource& src, const FilterProfile& alice_filter,
                                  Branch branch);

// Experimental: the same conditioning done by integrating the full joint
// density. Works for any pump bandwidth > 0.
Spectrum conditional_bob_spectrum_joint(const EnergyEntangledSource& src, const FilterProfile& alice_filter,
                                        Branch branch);

// Draws one pair; omega_a is restricted to the source grid. emission_time
// is left at zero for the caller to fill in.
PairSample sample_pair(const EnergyEntangledSource& src, RandomStream& stream);

// Draws a pair conditioned on Alice's filter outcome by rejection. The
// branch must have non-zero probability.
PairSample sample_pair_in_branch(const EnergyEntangledSource& src, const FilterProfile& alice_filter,
                                 Branch branch, RandomStream& stream);

}  // namespace steersim
