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

// Statistics on interference patterns: visibility, pattern comparison, the
// threshold scan over Alice's path length (with the kappa bound derived from
// it) and sample-size planning.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steersim/geometry.hpp"
#include "steersim/spectra.hpp"

namespace steersim {

enum class VisibilityMethod : std::uint8_t { CosineFit, MinMax };

struct VisibilityEstimate {
  double v = 0.0;
  double sigma_v = 0.0;
  VisibilityMethod method = VisibilityMethod::CosineFit;
  bool clamped = false;      // raw estimate exceeded 1
  bool fell_back = false;    // cosine fit ill-conditioned, min-max used
  bool degenerate = false;   // all values equal
  double mean_level = 0.0;   // fitted a in a (1 + v cos(w t + phi))
  double phase = 0.0;        // fitted phi
};

// Least-squares fit of a (1 + v cos(center_freq t + phi)) with the fringe
// frequency fixed. Points are weighted by 1/error^2 when every error is
// positive. Throws TooFewPoints for fewer than 5 points or a span shorter
// than one fringe period (cosine fit only).
VisibilityEstimate estimate_visibility(const InterferencePattern& p, double center_freq,
                                       VisibilityMethod method = VisibilityMethod::CosineFit);

struct ChiSquareResult {
  double chi2 = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t excluded_bins = 0;  // bins with zero combined error
};

// Pearson chi-square of the per-delay differences over the combined errors;
// differences of either sign count. Throws GridMismatch for different delays.
ChiSquareResult compare_patterns(const InterferencePattern& p1, const InterferencePattern& p2);

enum class ScanDecision : std::uint8_t { Collapsed, Unitary, Inconclusive };
enum class ScanVerdict : std::uint8_t { TransitionFound, BeyondScanRange, NonMonotone, NoDecision };

struct ScanInput {
  double alice_path = 0.0;  // m, path_s_f (or path_s_ad)
  InterferencePattern pattern;
};

struct ScanPointResult {
  double alice_path = 0.0;
  ScanDecision decision = ScanDecision::Inconclusive;
  double p_value = 1.0;      // p-value of the rejected reference
  double p_unitary = 1.0;    // evidence against the unitary reference
  double p_collapsed = 1.0;  // evidence against the collapsed reference
  double log_likelihood_ratio = 0.0;  // ln L_collapsed - ln L_unitary
};

struct ThresholdScanResult {
  std::vector<ScanPointResult> points;
  ScanVerdict verdict = ScanVerdict::NoDecision;
  std::optional<double> threshold_estimate;   // midpoint of the transition
  std::optional<double> threshold_half_width;
  std::optional<double> threshold_lower;      // last collapsed point
  std::optional<double> tau;                  // from threshold_lower
  std::optional<double> kappa_lower_bound;    // m/s
  bool kappa_unbounded = false;               // tau came out as zero
  std::string message;
};

// Classifies each scan point by a likelihood-ratio test between the two
// reference patterns at level alpha, then locates the collapsed -> unitary
// transition. tau and the kappa bound use the last collapsed point, which
// bounds the threshold distance from below. Interleaved decisions give
// verdict NonMonotone with no threshold.
ThresholdScanResult threshold_scan(std::span<const ScanInput> results, const InterferencePattern& reference_unitary,
                                   const InterferencePattern& reference_collapsed, double alpha,
                                   const Layout& layout);

struct SampleSizeResult {
  bool attainable = false;
  double events_per_delay = 0.0;     // continuous solution
  std::uint64_t events_per_delay_ceil = 0;
  double noncentrality_per_event = 0.0;
  double critical_value = 0.0;
  std::size_t dof = 0;
  std::vector<double> differences;   // p_collapsed - p_unitary per delay
};

// Smallest N (events per delay point) for which Pearson's chi-square of
// Poisson counts against the unitary expectation N p_unitary rejects at
// level alpha with the requested power when the data follow p_collapsed.
// Uses the noncentral chi-square with lambda = N sum (p_c - p_u)^2 / p_u.
SampleSizeResult required_samples(const InterferencePattern& p_unitary, const InterferencePattern& p_collapsed,
                                  double alpha, double power);

// Power of the same test at a given N.
double chi_square_power(const InterferencePattern& p_unitary, const InterferencePattern& p_collapsed, double alpha,
                        double events_per_delay);

const char* to_string(ScanDecision decision) noexcept;
const char* to_string(ScanVerdict verdict) noexcept;
const char* to_string(VisibilityMethod method) noexcept;

}  // namespace steersim
