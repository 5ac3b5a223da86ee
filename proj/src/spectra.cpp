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

#include "steersim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "steersim/error.hpp"

namespace steersim {

namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(6);
  os << value;
  return os.str();
}

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "operands are sampled on different frequency grids");
}

void require_no_aliasing(const FrequencyGrid& grid, std::span<const double> delays) {
  double max_delay = 0.0;
  for (double d : delays) max_delay = std::max(max_delay, std::fabs(d));
  if (max_delay * grid.spacing() > std::numbers::pi) {
    throw Error(ErrorCode::AliasingRisk,
                "delay " + describe(max_delay) + " s rotates the phase by more than pi between grid points");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FrequencyGrid
// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(double omega_min, double omega_max, std::size_t n_points,
                             std::optional<double> min_feature_width)
    : omega_min_(omega_min), omega_max_(omega_max), n_(n_points), spacing_(0.0) {
  if (!std::isfinite(omega_min) || !std::isfinite(omega_max) || !(omega_min < omega_max)) {
    throw Error(ErrorCode::InvalidArgument, "frequency grid needs omega_min < omega_max");
  }
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "frequency grid needs at least 2 points");
  spacing_ = (omega_max - omega_min) / static_cast<double>(n_points - 1);
  if (min_feature_width) {
    if (!(*min_feature_width > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "minimum feature width must be positive");
    }
    if (!resolves(*min_feature_width)) {
      throw Error(ErrorCode::GridTooCoarse, "spacing " + describe(spacing_) + " rad/s does not resolve width " +
                                                describe(*min_feature_width) + " rad/s with 16 points");
    }
  }
}

FrequencyGrid FrequencyGrid::centered(double center, double half_span, std::size_t n_points,
                                      std::optional<double> min_feature_width) {
  return FrequencyGrid(center - half_span, center + half_span, n_points, min_feature_width);
}

double FrequencyGrid::omega(std::size_t i) const noexcept {
  if (i + 1 == n_) return omega_max_;
  return omega_min_ + static_cast<double>(i) * spacing_;
}

double FrequencyGrid::offset(std::size_t i) const noexcept {
  return (static_cast<double>(i) - 0.5 * static_cast<double>(n_ - 1)) * spacing_;
}

bool FrequencyGrid::resolves(double sigma) const noexcept {
  return sigma >= kPointsPerSigma * spacing_ * (1.0 - 1e-12);
}

bool FrequencyGrid::contains(double lo, double hi) const noexcept {
  const double slack = 1e-12 * std::max(std::fabs(omega_min_), std::fabs(omega_max_));
  return lo >= omega_min_ - slack && hi <= omega_max_ + slack;
}

double FrequencyGrid::weight(std::size_t i) const noexcept {
  return (i == 0 || i + 1 == n_) ? 0.5 * spacing_ : spacing_;
}

FrequencyGrid FrequencyGrid::mirrored(double sum) const {
  return FrequencyGrid(sum - omega_max_, sum - omega_min_, n_);
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

Spectrum::Spectrum(FrequencyGrid grid, std::vector<double> density)
    : grid_(std::move(grid)), density_(std::move(density)) {
  if (density_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidArgument, "spectrum density size does not match its grid");
  }
  for (double d : density_) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::InvalidArgument, "spectral density must be finite and non-negative");
    }
  }
}

Spectrum Spectrum::empty(const FrequencyGrid& grid) {
  return Spectrum(grid, std::vector<double>(grid.size(), 0.0));
}

double Spectrum::total_weight() const noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) total += grid_.weight(i) * density_[i];
  return total;
}

double Spectrum::max_density() const noexcept {
  return density_.empty() ? 0.0 : *std::max_element(density_.begin(), density_.end());
}

double Spectrum::mean() const {
  const double total = total_weight();
  if (total == 0.0) throw Error(ErrorCode::EmptySpectrum, "mean of an empty spectrum");
  double first = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) first += grid_.weight(i) * density_[i] * grid_.offset(i);
  return grid_.center() + first / total;
}

double Spectrum::stddev() const {
  const double total = total_weight();
  if (total == 0.0) throw Error(ErrorCode::EmptySpectrum, "width of an empty spectrum");
  const double mu = mean() - grid_.center();
  double second = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) {
    const double d = grid_.offset(i) - mu;
    second += grid_.weight(i) * density_[i] * d * d;
  }
  return std::sqrt(second / total);
}

Spectrum Spectrum::scaled(double factor) const {
  if (!(factor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "spectrum scale factor must be non-negative");
  std::vector<double> out(density_);
  for (double& d : out) d *= factor;
  return Spectrum(grid_, std::move(out));
}

Spectrum Spectrum::normalized() const {
  const double total = total_weight();
  if (total == 0.0) throw Error(ErrorCode::EmptySpectrum, "cannot normalise an empty spectrum");
  return scaled(1.0 / total);
}

Spectrum Spectrum::operator+(const Spectrum& other) const {
  require_same_grid(grid_, other.grid_);
  std::vector<double> out(density_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.density_[i];
  return Spectrum(grid_, std::move(out));
}

// ---------------------------------------------------------------------------
// FilterProfile
// ---------------------------------------------------------------------------

FilterProfile::FilterProfile(FrequencyGrid grid, std::vector<double> transmission)
    : grid_(std::move(grid)), transmission_(std::move(transmission)) {
  if (transmission_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidArgument, "filter transmission size does not match its grid");
  }
  for (double t : transmission_) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "filter transmission must lie in [0, 1]");
  }
}

FilterProfile FilterProfile::constant(const FrequencyGrid& grid, double transmission) {
  return FilterProfile(grid, std::vector<double>(grid.size(), transmission));
}

FilterProfile FilterProfile::gaussian_bandpass(const FrequencyGrid& grid, double center, double sigma,
                                               double peak) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "filter width must be positive");
  if (!(peak >= 0.0 && peak <= 1.0)) throw Error(ErrorCode::InvalidArgument, "filter peak must lie in [0, 1]");
  if (!grid.resolves(sigma)) {
    throw Error(ErrorCode::GridTooCoarse, "filter width " + describe(sigma) + " rad/s is not resolved by the grid");
  }
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = (grid.omega(i) - center) / sigma;
    t[i] = peak * std::exp(-0.5 * x * x);
  }
  return FilterProfile(grid, std::move(t));
}

FilterProfile FilterProfile::rectangular(const FrequencyGrid& grid, double low, double high) {
  if (!(low < high)) throw Error(ErrorCode::InvalidArgument, "rectangular filter needs low < high");
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = grid.omega(i);
    t[i] = (w > low && w < high) ? 1.0 : (w == low || w == high) ? 0.5 : 0.0;
  }
  return FilterProfile(grid, std::move(t));
}

FilterProfile FilterProfile::step(const FrequencyGrid& grid, double edge, bool pass_above) {
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = grid.omega(i);
    if (w == edge) {
      t[i] = 0.5;
    } else {
      t[i] = ((w > edge) == pass_above) ? 1.0 : 0.0;
    }
  }
  return FilterProfile(grid, std::move(t));
}

double FilterProfile::transmission_at(double omega) const noexcept {
  if (omega <= grid_.omega_min()) return transmission_.front();
  if (omega >= grid_.omega_max()) return transmission_.back();
  const double x = (omega - grid_.omega_min()) / grid_.spacing();
  const auto i = std::min(static_cast<std::size_t>(x), grid_.size() - 2);
  const double frac = x - static_cast<double>(i);
  return transmission_[i] + frac * (transmission_[i + 1] - transmission_[i]);
}

// ---------------------------------------------------------------------------
// InterferencePattern
// ---------------------------------------------------------------------------

void InterferencePattern::validate() const {
  if (values.size() != delays.size() || errors.size() != delays.size()) {
    throw Error(ErrorCode::InvalidArgument, "pattern columns have different lengths");
  }
  for (std::size_t i = 1; i < delays.size(); ++i) {
    if (!(delays[i] > delays[i - 1])) throw Error(ErrorCode::InvalidArgument, "pattern delays must be strictly increasing");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !(errors[i] >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "pattern values and errors must be non-negative");
    }
  }
}

void InterferencePattern::validate_probability() const {
  validate();
  for (double v : values) {
    if (v > 1.0) throw Error(ErrorCode::InvalidArgument, "probability pattern value exceeds 1");
  }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Spectrum gaussian_spectrum(double center, double width_sigma, const FrequencyGrid& grid) {
  if (!(width_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "Gaussian width must be positive");
  if (!grid.resolves(width_sigma)) {
    throw Error(ErrorCode::GridTooCoarse, "grid spacing " + describe(grid.spacing()) +
                                              " rad/s gives fewer than 16 points per sigma " + describe(width_sigma));
  }
  if (!grid.contains(center - 5.0 * width_sigma, center + 5.0 * width_sigma)) {
    throw Error(ErrorCode::OutOfRange, "Gaussian +/-5 sigma support leaves the frequency grid");
  }
  std::vector<double> density(grid.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double x = (grid.omega(i) - center) / width_sigma;
    density[i] = std::exp(-0.5 * x * x);
  }
  return Spectrum(grid, std::move(density));
}

Spectrum rectangular_spectrum(double center, double full_width, const FrequencyGrid& grid) {
  if (!(full_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "rectangle width must be positive");
  const double lo = center - 0.5 * full_width;
  const double hi = center + 0.5 * full_width;
  if (!grid.contains(lo, hi)) throw Error(ErrorCode::OutOfRange, "rectangle leaves the frequency grid");
  if (full_width < kPointsPerSigma * grid.spacing()) {
    throw Error(ErrorCode::GridTooCoarse, "rectangle narrower than 16 grid points");
  }
  const auto box = FilterProfile::rectangular(grid, lo, hi);
  return Spectrum(grid, {box.transmission().begin(), box.transmission().end()});
}

FilteredParts apply_filter(const Spectrum& s, const FilterProfile& f) {
  require_same_grid(s.grid(), f.grid());
  std::vector<double> kept(s.grid().size());
  std::vector<double> lost(s.grid().size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    kept[i] = s[i] * f[i];
    lost[i] = s[i] * (1.0 - f[i]);
  }
  return {Spectrum(s.grid(), std::move(kept)), Spectrum(s.grid(), std::move(lost))};
}

double transmit_probability(const Spectrum& s, const FilterProfile& f) {
  require_same_grid(s.grid(), f.grid());
  const auto& grid = s.grid();
  double total = 0.0;
  double passed = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ws = grid.weight(i) * s[i];
    total += ws;
    passed += ws * f[i];
  }
  if (total == 0.0) throw Error(ErrorCode::EmptySpectrum, "transmission probability of an empty spectrum");
  return std::clamp(passed / total, 0.0, 1.0);
}

namespace {

// Returns (W, sum_i w_i s_i exp(-i omega_i t)). The carrier phase is split
// off at the grid centre so per-point phases stay small.
std::pair<double, std::complex<double>> spectral_transform(const Spectrum& s, double delay) {
  const auto& grid = s.grid();
  double total = 0.0;
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ws = grid.weight(i) * s[i];
    if (ws == 0.0) continue;
    const double phase = grid.offset(i) * delay;
    total += ws;
    re += ws * std::cos(phase);
    im -= ws * std::sin(phase);
  }
  const double carrier = grid.center() * delay;
  const std::complex<double> rotation(std::cos(carrier), -std::sin(carrier));
  if (delay == 0.0) return {total, {re, 0.0}};
  return {total, rotation * std::complex<double>(re, im)};
}

}  // namespace

std::complex<double> degree_of_coherence(const Spectrum& s, double delay) {
  const double single[] = {delay};
  require_no_aliasing(s.grid(), single);
  const auto [total, transform] = spectral_transform(s, delay);
  if (total == 0.0) throw Error(ErrorCode::EmptySpectrum, "degree of coherence of an empty spectrum");
  return transform / total;
}

InterferencePattern fringe_rate(const Spectrum& s, std::span<const double> delays) {
  require_no_aliasing(s.grid(), delays);
  InterferencePattern p;
  p.delays.assign(delays.begin(), delays.end());
  p.values.resize(delays.size());
  p.errors.assign(delays.size(), 0.0);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    const auto [total, transform] = spectral_transform(s, delays[k]);
    p.values[k] = std::max(0.0, 0.5 * (total + transform.real()));
  }
  p.validate();
  return p;
}

InterferencePattern fringe_pattern(const Spectrum& s, std::span<const double> delays) {
  if (s.is_empty()) throw Error(ErrorCode::EmptySpectrum, "fringe pattern of an empty spectrum");
  require_no_aliasing(s.grid(), delays);
  InterferencePattern p;
  p.delays.assign(delays.begin(), delays.end());
  p.values.resize(delays.size());
  p.errors.assign(delays.size(), 0.0);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    const auto [total, transform] = spectral_transform(s, delays[k]);
    p.values[k] = std::clamp(0.5 * (total + transform.real()) / total, 0.0, 1.0);
  }
  p.validate();
  return p;
}

std::vector<double> linspace(double first, double last, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = first;
    return out;
  }
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + static_cast<double>(i) * step;
  if (count > 1) out.back() = last;
  return out;
}

}  // namespace steersim
