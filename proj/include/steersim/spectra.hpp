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

// Frequency-domain primitives: spectral densities and filter transmission
// profiles sampled on a uniform angular-frequency grid, plus the
// interferogram that a two-path interferometer produces from a spectrum.
//
// All integrals use the trapezoidal rule on the grid. Spectra carry
// arbitrary units; patterns come in two forms:
//   rate form         R(t) = 1/2 (W + Re sum_i w_i s_i exp(-i omega_i t))
//   probability form  P(t) = R(t) / W
// with W the trapezoidal total weight. The rate form is linear in the
// spectrum, which is what branch superposition relies on.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace steersim {

// Minimum number of grid points required across one Gaussian sigma.
inline constexpr double kPointsPerSigma = 16.0;

class FrequencyGrid {
 public:
  // Throws InvalidArgument for an empty/inverted range or n_points < 2, and
  // GridTooCoarse when min_feature_width is given and not resolved.
  FrequencyGrid(double omega_min, double omega_max, std::size_t n_points,
                std::optional<double> min_feature_width = std::nullopt);

  // Grid centred on `center` with `n_points` covering +/- half_span.
  static FrequencyGrid centered(double center, double half_span, std::size_t n_points,
                                std::optional<double> min_feature_width = std::nullopt);

  double omega_min() const noexcept { return omega_min_; }
  double omega_max() const noexcept { return omega_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  double center() const noexcept { return 0.5 * (omega_min_ + omega_max_); }
  double omega(std::size_t i) const noexcept;
  // omega(i) - center(), computed without cancellation.
  double offset(std::size_t i) const noexcept;

  // True when at least kPointsPerSigma points fall across `sigma`.
  bool resolves(double sigma) const noexcept;
  bool contains(double lo, double hi) const noexcept;

  // Trapezoidal quadrature weight of point i.
  double weight(std::size_t i) const noexcept;

  // Grid of sum - omega, listed in increasing order: index i of the mirror
  // corresponds to index size()-1-i of this grid.
  FrequencyGrid mirrored(double sum) const;

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  double omega_min_;
  double omega_max_;
  std::size_t n_;
  double spacing_;
};

class Spectrum {
 public:
  // Throws InvalidArgument if sizes differ or any density is negative or
  // not finite.
  Spectrum(FrequencyGrid grid, std::vector<double> density);
  static Spectrum empty(const FrequencyGrid& grid);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const double> density() const noexcept { return density_; }
  double operator[](std::size_t i) const noexcept { return density_[i]; }

  double total_weight() const noexcept;
  double max_density() const noexcept;
  bool is_empty() const noexcept { return total_weight() == 0.0; }

  // Mean and standard deviation of the density, treated as a distribution.
  double mean() const;
  double stddev() const;

  Spectrum scaled(double factor) const;
  // Same spectrum scaled to unit total weight. Throws EmptySpectrum.
  Spectrum normalized() const;
  // Pointwise sum; throws GridMismatch.
  Spectrum operator+(const Spectrum& other) const;

 private:
  FrequencyGrid grid_;
  std::vector<double> density_;
};

class FilterProfile {
 public:
  // Throws InvalidArgument unless every transmission lies in [0, 1].
  FilterProfile(FrequencyGrid grid, std::vector<double> transmission);

  static FilterProfile constant(const FrequencyGrid& grid, double transmission);
  static FilterProfile gaussian_bandpass(const FrequencyGrid& grid, double center, double sigma,
                                         double peak = 1.0);
  // Passes [low, high]; points exactly on an edge transmit 1/2.
  static FilterProfile rectangular(const FrequencyGrid& grid, double low, double high);
  // Half-line edge. pass_above selects omega > edge; the edge point transmits 1/2.
  static FilterProfile step(const FrequencyGrid& grid, double edge, bool pass_above = true);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const double> transmission() const noexcept { return transmission_; }
  double operator[](std::size_t i) const noexcept { return transmission_[i]; }

  // Linear interpolation between grid points, edge value outside the grid.
  double transmission_at(double omega) const noexcept;

 private:
  FrequencyGrid grid_;
  std::vector<double> transmission_;
};

struct InterferencePattern {
  std::vector<double> delays;  // seconds, strictly increasing
  std::vector<double> values;
  std::vector<double> errors;  // one standard deviation

  std::size_t size() const noexcept { return delays.size(); }
  // Throws InvalidArgument on size mismatch, non-increasing delays or
  // negative values/errors.
  void validate() const;
  // validate() plus values in [0, 1].
  void validate_probability() const;
};

struct FilteredParts {
  Spectrum transmitted;
  Spectrum absorbed;
};

Spectrum gaussian_spectrum(double center, double width_sigma, const FrequencyGrid& grid);
// Flat top of full width `full_width`; points exactly on an edge carry 1/2.
Spectrum rectangular_spectrum(double center, double full_width, const FrequencyGrid& grid);

FilteredParts apply_filter(const Spectrum& s, const FilterProfile& f);
double transmit_probability(const Spectrum& s, const FilterProfile& f);

// Normalised degree of coherence mu(t) = int s exp(-i w t) / int s.
std::complex<double> degree_of_coherence(const Spectrum& s, double delay);

// Probability form: values = 1/2 (1 + Re mu), errors = 0.
InterferencePattern fringe_pattern(const Spectrum& s, std::span<const double> delays);
// Rate form (not divided by the total weight). An empty spectrum gives zeros.
InterferencePattern fringe_rate(const Spectrum& s, std::span<const double> delays);

// Evenly spaced values from first to last inclusive.
std::vector<double> linspace(double first, double last, std::size_t count);

}  // namespace steersim
