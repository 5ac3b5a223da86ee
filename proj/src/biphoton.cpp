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

#include "steersim/biphoton.hpp"

#include <cmath>
#include <vector>

#include "steersim/error.hpp"

namespace steersim {

EnergyEntangledSource::EnergyEntangledSource(double pump_center, double pump_bandwidth_sigma, double signal_center,
                                             double phase_matching_sigma, FrequencyGrid grid)
    : pump_center_(pump_center),
      pump_bandwidth_sigma_(pump_bandwidth_sigma),
      signal_center_(signal_center),
      phase_matching_sigma_(phase_matching_sigma),
      grid_(grid),
      grid_b_(grid.mirrored(pump_center)) {
  if (!(pump_center > 0.0)) throw Error(ErrorCode::InvalidArgument, "pump centre must be positive");
  if (!(pump_bandwidth_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pump bandwidth must be >= 0");
  if (!(phase_matching_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "phase-matching width must be > 0");
  if (!grid_.resolves(phase_matching_sigma)) {
    throw Error(ErrorCode::GridTooCoarse, "grid does not resolve the phase-matching width");
  }
  if (!is_cw() && !grid_.resolves(pump_bandwidth_sigma)) {
    throw Error(ErrorCode::GridTooCoarse, "grid does not resolve the pump bandwidth");
  }
  for (Wing wing : {Wing::A, Wing::B}) {
    const double c = center_of(wing);
    const double w = width_of(wing);
    if (!grid_for(wing).contains(c - 5.0 * w, c + 5.0 * w)) {
      throw Error(ErrorCode::OutOfRange,
                  std::string("marginal support of wing ") + (wing == Wing::A ? "A" : "B") + " leaves its grid");
    }
  }
}

EnergyEntangledSource EnergyEntangledSource::degenerate_cw(double pump_center, double phase_matching_sigma,
                                                           std::size_t n_points, double half_span_sigmas) {
  const double center = 0.5 * pump_center;
  return EnergyEntangledSource(pump_center, 0.0, center, phase_matching_sigma,
                               FrequencyGrid::centered(center, half_span_sigmas * phase_matching_sigma, n_points));
}

double EnergyEntangledSource::center_of(Wing wing) const noexcept {
  return wing == Wing::A ? signal_center_ : pump_center_ - signal_center_;
}

double EnergyEntangledSource::width_of(Wing wing) const noexcept {
  if (wing == Wing::A) return phase_matching_sigma_;
  return std::hypot(phase_matching_sigma_, pump_bandwidth_sigma_);
}

void PolarizationEntangledSource::validate() const {
  if (!(coherence_gamma >= 0.0 && coherence_gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "coherence_gamma must lie in [0, 1]");
  }
  if (!(center_frequency > 0.0)) throw Error(ErrorCode::InvalidArgument, "centre frequency must be positive");
}

namespace {

// Phase-matching factor on the A grid.
std::vector<double> phase_matching(const EnergyEntangledSource& src) {
  const auto& grid = src.grid();
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = (grid.omega(i) - src.signal_center()) / src.phase_matching_sigma();
    g[i] = std::exp(-0.5 * x * x);
  }
  return g;
}

// Pump factor for A index i and B index j depends only on i + j - (n - 1),
// because wA_i + wB_j - wp = wA_i - wA_{n-1-j}.
std::vector<double> pump_kernel(const EnergyEntangledSource& src) {
  const auto n = static_cast<std::ptrdiff_t>(src.grid().size());
  const double h = src.grid().spacing();
  std::vector<double> k(static_cast<std::size_t>(2 * n - 1));
  for (std::ptrdiff_t d = -(n - 1); d <= n - 1; ++d) {
    const double x = static_cast<double>(d) * h / src.pump_bandwidth_sigma();
    k[static_cast<std::size_t>(d + n - 1)] = std::exp(-0.5 * x * x);
  }
  return k;
}

double branch_factor(double t, Branch branch) { return branch == Branch::Transmitted ? t : 1.0 - t; }

// Joint-density quadrature: returns the (un-normalised) density of the
// requested wing, optionally weighted by Alice's filter outcome.
std::vector<double> joint_marginal(const EnergyEntangledSource& src, Wing wing, const FilterProfile* filter,
                                   Branch branch) {
  const auto n = src.grid().size();
  const auto g = phase_matching(src);
  const auto kernel = pump_kernel(src);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double a_weight = g[i];
    if (filter) a_weight *= branch_factor((*filter)[i], branch);
    if (a_weight == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double k = kernel[i + j];
      if (wing == Wing::A) {
        out[i] += src.grid_b().weight(j) * k * a_weight;
      } else {
        out[j] += src.grid().weight(i) * k * a_weight;
      }
    }
  }
  return out;
}

}  // namespace

Spectrum marginal_spectrum(const EnergyEntangledSource& src, Wing wing) {
  if (!src.is_cw()) {
    return Spectrum(src.grid_for(wing), joint_marginal(src, wing, nullptr, Branch::Transmitted)).normalized();
  }
  const auto a = gaussian_spectrum(src.signal_center(), src.phase_matching_sigma(), src.grid()).normalized();
  if (wing == Wing::A) return a;
  // Energy conservation: the B density at wp - w equals the A density at w.
  std::vector<double> mirrored(a.density().rbegin(), a.density().rend());
  return Spectrum(src.grid_b(), std::move(mirrored));
}

Spectrum conditional_bob_spectrum(const EnergyEntangledSource& src, const FilterProfile& alice_filter,
                                  Branch branch) {
  if (!src.is_cw()) {
    throw Error(ErrorCode::UnsupportedSource,
                "closed-form conditioning needs a CW pump; use conditional_bob_spectrum_joint");
  }
  if (!(alice_filter.grid() == src.grid())) {
    throw Error(ErrorCode::GridMismatch, "Alice's filter must be sampled on the source grid");
  }
  const auto b = marginal_spectrum(src, Wing::B);
  const auto n = b.grid().size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = b[j] * branch_factor(alice_filter[n - 1 - j], branch);
  return Spectrum(b.grid(), std::move(out));
}

Spectrum conditional_bob_spectrum_joint(const EnergyEntangledSource& src, const FilterProfile& alice_filter,
                                        Branch branch) {
  if (src.is_cw()) {
    throw Error(ErrorCode::UnsupportedSource, "joint conditioning needs a finite pump bandwidth");
  }
  if (!(alice_filter.grid() == src.grid())) {
    throw Error(ErrorCode::GridMismatch, "Alice's filter must be sampled on the source grid");
  }
  const Spectrum unconditioned(src.grid_b(), joint_marginal(src, Wing::B, nullptr, branch));
  const double total = unconditioned.total_weight();
  return Spectrum(src.grid_b(), joint_marginal(src, Wing::B, &alice_filter, branch)).scaled(1.0 / total);
}

PairSample sample_pair(const EnergyEntangledSource& src, RandomStream& stream) {
  const auto& grid = src.grid();
  PairSample pair;
  do {
    pair.omega_a = src.signal_center() + src.phase_matching_sigma() * stream.normal();
  } while (pair.omega_a < grid.omega_min() || pair.omega_a > grid.omega_max());
  pair.omega_b = src.pump_center() - pair.omega_a;
  if (!src.is_cw()) pair.omega_b += src.pump_bandwidth_sigma() * stream.normal();
  return pair;
}

PairSample sample_pair_in_branch(const EnergyEntangledSource& src, const FilterProfile& alice_filter,
                                 Branch branch, RandomStream& stream) {
  constexpr int kMaxTries = 100'000'000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    auto pair = sample_pair(src, stream);
    if (stream.bernoulli(branch_factor(alice_filter.transmission_at(pair.omega_a), branch))) return pair;
  }
  throw Error(ErrorCode::EmptySpectrum, "filter branch has (numerically) zero probability");
}

}  // namespace steersim
