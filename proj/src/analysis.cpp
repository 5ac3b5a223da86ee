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

#include "steersim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "steersim/error.hpp"

namespace steersim {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

std::optional<Mat3> invert(const Mat3& m) {
  // Reject near-singular systems on the scale-free correlation form.
  const double s0 = std::sqrt(m[0][0]), s1 = std::sqrt(m[1][1]), s2 = std::sqrt(m[2][2]);
  if (!(s0 > 0.0 && s1 > 0.0 && s2 > 0.0)) return std::nullopt;
  const double r01 = m[0][1] / (s0 * s1), r02 = m[0][2] / (s0 * s2), r12 = m[1][2] / (s1 * s2);
  const double corr_det = 1.0 + 2.0 * r01 * r02 * r12 - r01 * r01 - r02 * r02 - r12 * r12;
  if (!(corr_det > 1e-10)) return std::nullopt;

  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

VisibilityEstimate min_max_visibility(const InterferencePattern& p) {
  VisibilityEstimate est;
  est.method = VisibilityMethod::MinMax;
  if (p.size() == 0) throw Error(ErrorCode::TooFewPoints, "visibility of an empty pattern");
  const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
  const double mn = *lo;
  const double mx = *hi;
  est.mean_level = 0.5 * (mn + mx);
  if (mx == mn || mx + mn <= 0.0) {
    est.degenerate = true;
    est.v = 0.0;
    if (mx + mn > 0.0) {
      const double e = p.errors[static_cast<std::size_t>(hi - p.values.begin())];
      est.sigma_v = std::sqrt(2.0) * e / (mx + mn);
    }
    return est;
  }
  const double sum = mx + mn;
  est.v = (mx - mn) / sum;
  const double e_max = p.errors[static_cast<std::size_t>(hi - p.values.begin())];
  const double e_min = p.errors[static_cast<std::size_t>(lo - p.values.begin())];
  const double d_max = 2.0 * mn / (sum * sum);
  const double d_min = 2.0 * mx / (sum * sum);
  est.sigma_v = std::hypot(d_max * e_max, d_min * e_min);
  if (est.v > 1.0) {
    est.v = 1.0;
    est.clamped = true;
  }
  return est;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

bool same_delays(const InterferencePattern& a, const InterferencePattern& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::fabs(a.delays[i]), std::fabs(b.delays[i]));
    if (std::fabs(a.delays[i] - b.delays[i]) > 1e-12 * scale) return false;
  }
  return true;
}

}  // namespace

VisibilityEstimate estimate_visibility(const InterferencePattern& p, double center_freq, VisibilityMethod method) {
  p.validate();
  if (method == VisibilityMethod::MinMax) return min_max_visibility(p);

  const std::size_t n = p.size();
  if (n < 5) throw Error(ErrorCode::TooFewPoints, "cosine fit needs at least 5 delay points");
  const double span = p.delays.back() - p.delays.front();
  if (span * std::fabs(center_freq) < 2.0 * std::numbers::pi * (1.0 - 1e-9)) {
    throw Error(ErrorCode::TooFewPoints, "delay points must span at least one fringe period");
  }

  const bool weighted = std::all_of(p.errors.begin(), p.errors.end(), [](double e) { return e > 0.0; });
  Mat3 normal{};
  std::array<double, 3> rhs{};
  std::vector<std::array<double, 3>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = center_freq * p.delays[i];
    rows[i] = {1.0, std::cos(phase), std::sin(phase)};
    const double w = weighted ? 1.0 / (p.errors[i] * p.errors[i]) : 1.0;
    for (int r = 0; r < 3; ++r) {
      rhs[r] += w * rows[i][r] * p.values[i];
      for (int c = 0; c < 3; ++c) normal[r][c] += w * rows[i][r] * rows[i][c];
    }
  }
  const auto inv = invert(normal);
  if (!inv) {
    auto est = min_max_visibility(p);
    est.fell_back = true;
    return est;
  }
  std::array<double, 3> coef{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) coef[r] += (*inv)[r][c] * rhs[c];
  }

  Mat3 cov = *inv;
  if (!weighted) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fit = coef[0] + coef[1] * rows[i][1] + coef[2] * rows[i][2];
      rss += (p.values[i] - fit) * (p.values[i] - fit);
    }
    const double s2 = rss / static_cast<double>(n - 3);
    for (auto& row : cov) {
      for (double& x : row) x *= s2;
    }
  }

  VisibilityEstimate est;
  est.method = VisibilityMethod::CosineFit;
  est.mean_level = coef[0];
  const double amplitude = std::hypot(coef[1], coef[2]);
  est.phase = std::atan2(-coef[2], coef[1]);
  const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
  est.degenerate = *lo == *hi;
  if (!(coef[0] > 0.0)) {
    est.degenerate = true;
    return est;
  }
  if (est.degenerate || amplitude == 0.0) {
    est.v = 0.0;
    est.sigma_v = std::sqrt(std::max(0.0, cov[1][1] + cov[2][2])) / coef[0];
    return est;
  }
  const double v = amplitude / coef[0];
  const std::array<double, 3> grad{-v / coef[0], coef[1] / (amplitude * coef[0]), coef[2] / (amplitude * coef[0])};
  double var = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) var += grad[r] * cov[r][c] * grad[c];
  }
  est.sigma_v = std::sqrt(std::max(0.0, var));
  est.v = v;
  if (v > 1.0) {
    est.v = 1.0;
    est.clamped = true;
  }
  return est;
}

ChiSquareResult compare_patterns(const InterferencePattern& p1, const InterferencePattern& p2) {
  p1.validate();
  p2.validate();
  if (!same_delays(p1, p2)) throw Error(ErrorCode::GridMismatch, "patterns are sampled at different delays");
  ChiSquareResult out;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double var = p1.errors[i] * p1.errors[i] + p2.errors[i] * p2.errors[i];
    if (var == 0.0) {
      ++out.excluded_bins;
      continue;
    }
    const double d = p1.values[i] - p2.values[i];
    out.chi2 += d * d / var;
    ++out.dof;
  }
  out.p_value = out.dof == 0 ? 1.0 : boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.chi2);
  return out;
}

ThresholdScanResult threshold_scan(std::span<const ScanInput> results, const InterferencePattern& reference_unitary,
                                   const InterferencePattern& reference_collapsed, double alpha,
                                   const Layout& layout) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (!same_delays(reference_unitary, reference_collapsed)) {
    throw Error(ErrorCode::GridMismatch, "reference patterns are sampled at different delays");
  }
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (!(results[i].alice_path > results[i - 1].alice_path)) {
      throw Error(ErrorCode::InvalidArgument, "scan points must be sorted by increasing path length");
    }
  }

  ThresholdScanResult out;
  for (const auto& point : results) {
    if (!same_delays(point.pattern, reference_unitary)) {
      throw Error(ErrorCode::GridMismatch, "scan pattern and references use different delays");
    }
    // With Gaussian errors the log-likelihood ratio statistic
    // chi2_u - chi2_c is N(-D, 4D) under the unitary reference and N(D, 4D)
    // under the collapsed one, D being the references' separation.
    double separation = 0.0;
    double delta = 0.0;
    for (std::size_t i = 0; i < point.pattern.size(); ++i) {
      const double sigma = point.pattern.errors[i];
      if (!(sigma > 0.0)) continue;
      const double du = point.pattern.values[i] - reference_unitary.values[i];
      const double dc = point.pattern.values[i] - reference_collapsed.values[i];
      const double gap = reference_unitary.values[i] - reference_collapsed.values[i];
      delta += (du * du - dc * dc) / (sigma * sigma);
      separation += gap * gap / (sigma * sigma);
    }
    ScanPointResult r;
    r.alice_path = point.alice_path;
    r.log_likelihood_ratio = 0.5 * delta;
    if (separation > 0.0) {
      const double spread = 2.0 * std::sqrt(separation);
      r.p_unitary = normal_sf((delta + separation) / spread);
      r.p_collapsed = normal_sf((separation - delta) / spread);
    }
    const bool reject_u = r.p_unitary < alpha;
    const bool reject_c = r.p_collapsed < alpha;
    if (reject_u && !reject_c) {
      r.decision = ScanDecision::Collapsed;
      r.p_value = r.p_unitary;
    } else if (reject_c && !reject_u) {
      r.decision = ScanDecision::Unitary;
      r.p_value = r.p_collapsed;
    } else {
      r.decision = ScanDecision::Inconclusive;
      r.p_value = std::min(r.p_unitary, r.p_collapsed);
    }
    out.points.push_back(r);
  }

  std::optional<std::size_t> last_collapsed;
  std::optional<std::size_t> first_unitary;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.points[i].decision == ScanDecision::Collapsed) last_collapsed = i;
    if (out.points[i].decision == ScanDecision::Unitary && !first_unitary) first_unitary = i;
  }
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (first_unitary && out.points[i].decision == ScanDecision::Collapsed && i > *first_unitary) {
      out.verdict = ScanVerdict::NonMonotone;
      out.message = "inconclusive: collapsed and unitary decisions interleave along the scan";
      return out;
    }
  }

  if (!last_collapsed && !first_unitary) {
    out.verdict = ScanVerdict::NoDecision;
    out.message = "inconclusive: no scan point was classified";
    return out;
  }
  if (!last_collapsed) {
    out.verdict = ScanVerdict::BeyondScanRange;
    out.message = "threshold beyond scan range: no collapse seen at any scanned path; kappa unconstrained";
    return out;
  }

  const double lower = out.points[*last_collapsed].alice_path;
  out.threshold_lower = lower;
  if (first_unitary) {
    const double upper = out.points[*first_unitary].alice_path;
    out.verdict = ScanVerdict::TransitionFound;
    out.threshold_estimate = 0.5 * (lower + upper);
    out.threshold_half_width = 0.5 * (upper - lower);
    out.message = "transition found";
  } else {
    out.verdict = ScanVerdict::BeyondScanRange;
    out.message = "threshold beyond scan range: collapse seen up to the last scanned path; one-sided kappa bound";
  }

  try {
    out.tau = tau_of_flight(layout.path_s_bd, lower, layout.light_speed);
    out.kappa_lower_bound = kappa(layout.collapse_transit(), *out.tau);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DivisionByZeroTau) {
      out.kappa_unbounded = true;
      out.message += "; tau is zero so kappa is unbounded";
    } else if (e.code() == ErrorCode::NegativeTau) {
      out.tau.reset();
      out.message += "; NegativeTau: threshold estimate exceeds path_s_bd";
    } else {
      throw;
    }
  }
  return out;
}

namespace {

struct Noncentrality {
  double per_event = 0.0;
  std::size_t dof = 0;
  std::vector<double> differences;
};

Noncentrality pearson_noncentrality(const InterferencePattern& p_unitary, const InterferencePattern& p_collapsed) {
  p_unitary.validate_probability();
  p_collapsed.validate_probability();
  if (!same_delays(p_unitary, p_collapsed)) {
    throw Error(ErrorCode::GridMismatch, "patterns are sampled at different delays");
  }
  Noncentrality out;
  for (std::size_t i = 0; i < p_unitary.size(); ++i) {
    const double d = p_collapsed.values[i] - p_unitary.values[i];
    out.differences.push_back(d);
    if (!(p_unitary.values[i] > 0.0)) continue;
    out.per_event += d * d / p_unitary.values[i];
    ++out.dof;
  }
  return out;
}

}  // namespace

SampleSizeResult required_samples(const InterferencePattern& p_unitary, const InterferencePattern& p_collapsed,
                                  double alpha, double power) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(power > alpha && power < 1.0)) throw Error(ErrorCode::InvalidArgument, "power must lie in (alpha, 1)");
  const auto nc = pearson_noncentrality(p_unitary, p_collapsed);
  SampleSizeResult out;
  out.dof = nc.dof;
  out.differences = nc.differences;
  out.noncentrality_per_event = nc.per_event;
  if (nc.dof == 0 || !(nc.per_event > 0.0)) return out;

  const auto k = static_cast<double>(nc.dof);
  out.critical_value = boost::math::quantile(boost::math::chi_squared_distribution<double>(k), 1.0 - alpha);
  const double lambda =
      boost::math::non_central_chi_squared_distribution<double>::find_non_centrality(k, out.critical_value,
                                                                                     1.0 - power);
  out.attainable = true;
  out.events_per_delay = lambda / nc.per_event;
  out.events_per_delay_ceil = static_cast<std::uint64_t>(std::ceil(out.events_per_delay));
  return out;
}

double chi_square_power(const InterferencePattern& p_unitary, const InterferencePattern& p_collapsed, double alpha,
                        double events_per_delay) {
  const auto nc = pearson_noncentrality(p_unitary, p_collapsed);
  if (nc.dof == 0) return alpha;
  const auto k = static_cast<double>(nc.dof);
  const double crit = boost::math::quantile(boost::math::chi_squared_distribution<double>(k), 1.0 - alpha);
  const double lambda = nc.per_event * events_per_delay;
  if (lambda == 0.0) return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(k), crit));
  return boost::math::cdf(
      boost::math::complement(boost::math::non_central_chi_squared_distribution<double>(k, lambda), crit));
}

const char* to_string(ScanDecision decision) noexcept {
  switch (decision) {
    case ScanDecision::Collapsed: return "collapsed";
    case ScanDecision::Unitary: return "unitary";
    case ScanDecision::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(ScanVerdict verdict) noexcept {
  switch (verdict) {
    case ScanVerdict::TransitionFound: return "transition_found";
    case ScanVerdict::BeyondScanRange: return "threshold_beyond_scan_range";
    case ScanVerdict::NonMonotone: return "inconclusive";
    case ScanVerdict::NoDecision: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(VisibilityMethod method) noexcept {
  return method == VisibilityMethod::CosineFit ? "cosine_fit" : "minmax";
}

}  // namespace steersim
