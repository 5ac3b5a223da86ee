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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "steersim/analysis.hpp"
#include "steersim/models.hpp"
#include "steersim/montecarlo.hpp"
#include "support.hpp"

using namespace steersim;
using support::code_of;

namespace {

constexpr double kW0 = 2.355e15;
const double kPeriod = 2.0 * std::numbers::pi / kW0;

InterferencePattern cosine(double v, std::size_t n = 21, double phase = 0.0, double scale = 1.0) {
  InterferencePattern p;
  p.delays = linspace(0.0, kPeriod, n);
  for (const double t : p.delays) p.values.push_back(scale * 0.5 * (1.0 + v * std::cos(kW0 * t + phase)));
  p.errors.assign(n, 0.0);
  return p;
}

InterferencePattern with_poisson_errors(InterferencePattern p) {
  for (std::size_t i = 0; i < p.size(); ++i) p.errors[i] = std::sqrt(p.values[i]);
  return p;
}

Layout scan_layout() {
  Layout l;
  l.path_s_f = 5.0;
  l.path_s_bd = 27.0;
  l.dist_f_bd = 12.0;
  l.light_speed = 3.0e8;
  return l;
}

// Monte Carlo power of Pearson's test at N events per delay, with counts
// drawn by the standard library.
double mc_power(const InterferencePattern& pu, const InterferencePattern& pc, double alpha, double n, int trials,
                std::mt19937_64& gen) {
  const boost::math::chi_squared dist(static_cast<double>(pu.size()));
  const double crit = boost::math::quantile(dist, 1.0 - alpha);
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < pu.size(); ++i) {
      std::poisson_distribution<int> draw(n * pc.values[i]);
      const double expected = n * pu.values[i];
      const double d = draw(gen) - expected;
      chi2 += d * d / expected;
    }
    rejected += chi2 > crit;
  }
  return static_cast<double>(rejected) / trials;
}

}  // namespace

TEST_CASE("visibility of noise-free patterns") {
  CHECK(std::abs(estimate_visibility(cosine(1.0), kW0).v - 1.0) < 1e-9);
  CHECK(std::abs(estimate_visibility(cosine(0.37, 31, 0.8), kW0).v - 0.37) < 1e-9);
  const auto flat = estimate_visibility(cosine(0.0), kW0);
  CHECK(flat.v == 0.0);
  CHECK(flat.degenerate);
  CHECK(estimate_visibility(cosine(0.6), kW0, VisibilityMethod::MinMax).v == doctest::Approx(0.6).epsilon(1e-3));
  for (const double v : {0.05, 0.5, 0.93}) {
    const double a = estimate_visibility(cosine(v, 21, 0.3), kW0).v;
    const double b = estimate_visibility(cosine(v, 21, 0.3, 1.7e6), kW0).v;
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("visibility preconditions and fallbacks") {
  CHECK(code_of([] { estimate_visibility(cosine(1.0, 4), kW0); }) == ErrorCode::TooFewPoints);
  auto short_span = cosine(1.0);
  for (auto& t : short_span.delays) t *= 0.5;
  CHECK(code_of([&] { estimate_visibility(short_span, kW0); }) == ErrorCode::TooFewPoints);
  CHECK_NOTHROW(estimate_visibility(short_span, kW0, VisibilityMethod::MinMax));

  // Every point at the same fringe phase: cos and sin columns are constant.
  InterferencePattern same_phase;
  for (int k = 0; k < 6; ++k) {
    same_phase.delays.push_back(k * kPeriod);
    same_phase.values.push_back(0.4 + 0.01 * k);
    same_phase.errors.push_back(0.0);
  }
  const auto fb = estimate_visibility(same_phase, kW0);
  CHECK(fb.fell_back);
  CHECK(fb.method == VisibilityMethod::MinMax);

  auto over = cosine(1.0);
  over.values[0] += 0.02;
  over.values[10] = 0.0;
  const auto clamped = estimate_visibility(over, kW0);
  CHECK(clamped.v <= 1.0);
}

TEST_CASE("polarization MC visibility under condition (5)") {
  SimulationSetup s;
  s.scheme = Scheme::Polarization;
  s.model = PhysicsModel::collapse(kInfiniteSpeed, 100.0, Weighting::Equal, 1.0);
  s.polarization_source = PolarizationEntangledSource{1.0, kW0};
  s.layout.path_s_ad = 30.0;
  s.layout.path_s_bd = 20.0;
  s.layout.dist_f_bd = 10.0;
  RunConfig run;
  run.pair_rate = 1e6;
  run.seed = 17;
  run.delay_schedule = uniform_schedule(linspace(0.0, kPeriod, 21), 0.1);
  const auto binned = bin_pattern(simulate(s, run), run.delay_schedule);
  const auto est = estimate_visibility(binned.pattern, kW0);
  CHECK(std::abs(est.v - 1.0) <= 3.0 * est.sigma_v);
  CHECK(est.sigma_v > 0.0);
  CHECK(est.sigma_v < 0.01);
}

TEST_CASE("compare_patterns basics") {
  const auto a = with_poisson_errors(cosine(0.5, 21, 0.0, 1e4));
  const auto same = compare_patterns(a, a);
  CHECK(same.chi2 == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(same.dof == 21);

  auto b = a;
  b.errors[3] = 0.0;
  auto c = a;
  c.errors[3] = 0.0;
  c.values[0] += 3.0 * std::sqrt(2.0) * a.errors[0];
  const auto r = compare_patterns(b, c);
  CHECK(r.excluded_bins == 1);
  CHECK(r.dof == 20);
  CHECK(r.chi2 == doctest::Approx(9.0));
  const boost::math::chi_squared dist(20.0);
  CHECK(r.p_value == doctest::Approx(boost::math::cdf(boost::math::complement(dist, 9.0))));

  auto shifted = a;
  shifted.delays[2] *= 1.01;
  CHECK(code_of([&] { compare_patterns(a, shifted); }) == ErrorCode::GridMismatch);
}

TEST_CASE("p-values of independent runs of one configuration are uniform") {
  SimulationSetup s;
  s.scheme = Scheme::Polarization;
  s.model = PhysicsModel::collapse(kInfiniteSpeed, 100.0, Weighting::Equal, 0.8);
  s.polarization_source = PolarizationEntangledSource{0.8, kW0};
  s.layout.path_s_ad = 30.0;
  s.layout.path_s_bd = 20.0;
  s.layout.dist_f_bd = 10.0;
  RunConfig run;
  run.pair_rate = 1e5;
  run.delay_schedule = uniform_schedule(linspace(0.0, kPeriod, 21), 0.02);
  std::vector<double> p;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    run.seed = 2 * seed + 1;
    const auto x = bin_pattern(simulate(s, run), run.delay_schedule);
    run.seed = 2 * seed + 2;
    const auto y = bin_pattern(simulate(s, run), run.delay_schedule);
    p.push_back(compare_patterns(x.pattern, y.pattern).p_value);
  }
  CHECK(oracle::ks_uniform_p_value(p) > 0.01);
}

TEST_CASE("unitary and equal-weight collapse are told apart at 1e5 events per delay") {
  const auto src = EnergyEntangledSource::degenerate_cw(2.0 * kW0, 1e13, 5121);
  const auto f = FilterProfile::gaussian_bandpass(src.grid(), kW0, 1e13 / 20.0);
  Layout l;
  l.path_s_f = 10.0;
  l.path_s_bd = 20.0;
  l.dist_f_bd = 15.0;
  SimulationSetup s;
  s.model = PhysicsModel::collapse(kInfiniteSpeed, 50.0);
  s.energy_source = src;
  s.filter = f;
  s.layout = l;
  RunConfig run;
  run.pair_rate = 1e6;
  run.seed = 5;
  const auto delays = linspace(5e-13, 5e-13 + kPeriod, 21);
  run.delay_schedule = uniform_schedule(delays, 0.1);
  const auto binned = bin_pattern(simulate(s, run), run.delay_schedule);
  const auto unitary = expected_rate(predict_energy_scheme(PhysicsModel::unitary(), src, f, l, delays).singles_bob, run);
  CHECK(compare_patterns(binned.pattern, unitary).p_value < 1e-6);
  const auto collapsed = expected_rate(predict_energy_scheme(s.model, src, f, l, delays).singles_bob, run);
  CHECK(compare_patterns(binned.pattern, collapsed).p_value > 0.01);
}

TEST_CASE("threshold scan on synthetic patterns") {
  const auto ref_u = with_poisson_errors(cosine(0.0, 21, 0.0, 1e4));
  const auto ref_c = with_poisson_errors(cosine(0.5, 21, 0.0, 1e4));
  auto scan = [&](const std::function<bool(double)>& collapsed) {
    std::vector<ScanInput> in;
    for (double path = 5.0; path <= 25.0; path += 1.0) in.push_back({path, collapsed(path) ? ref_c : ref_u});
    return threshold_scan(in, ref_u, ref_c, 0.01, scan_layout());
  };

  const auto found = scan([](double x) { return x <= 15.0; });
  CHECK(found.verdict == ScanVerdict::TransitionFound);
  CHECK(*found.threshold_estimate == 15.5);
  CHECK(*found.threshold_half_width == 0.5);
  CHECK(std::abs(*found.threshold_estimate - 15.0) <= *found.threshold_half_width);
  CHECK(*found.threshold_lower == 15.0);
  CHECK(*found.tau == doctest::Approx(4.0e-8).epsilon(1e-14));
  CHECK(*found.kappa_lower_bound == doctest::Approx(3.0e8).epsilon(1e-14));
  CHECK(found.points.front().decision == ScanDecision::Collapsed);
  CHECK(found.points.back().decision == ScanDecision::Unitary);

  const auto none = scan([](double) { return false; });
  CHECK(none.verdict == ScanVerdict::BeyondScanRange);
  CHECK(std::string(to_string(none.verdict)) == "threshold_beyond_scan_range");
  CHECK_FALSE(none.threshold_estimate.has_value());

  const auto all = scan([](double) { return true; });
  CHECK(all.verdict == ScanVerdict::BeyondScanRange);
  CHECK(*all.threshold_lower == 25.0);
  CHECK(all.kappa_lower_bound.has_value());

  const auto mixed = scan([](double x) { return x <= 10.0 || x == 18.0; });
  CHECK(mixed.verdict == ScanVerdict::NonMonotone);
  CHECK(std::string(to_string(mixed.verdict)) == "inconclusive");
  CHECK_FALSE(mixed.threshold_estimate.has_value());

  // A later transition leaves less flight time and a larger bound.
  double previous_tau = 1.0;
  double previous_kappa = 0.0;
  for (const double d : {8.0, 12.0, 16.0, 20.0}) {
    const auto r = scan([d](double x) { return x <= d; });
    CHECK(*r.tau < previous_tau);
    CHECK(*r.kappa_lower_bound > previous_kappa);
    previous_tau = *r.tau;
    previous_kappa = *r.kappa_lower_bound;
  }

  std::vector<ScanInput> unsorted{{6.0, ref_u}, {5.0, ref_u}};
  CHECK(code_of([&] { threshold_scan(unsorted, ref_u, ref_c, 0.01, scan_layout()); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sample size: identical patterns are unattainable") {
  const auto p = cosine(0.0);
  const auto r = required_samples(p, p, 0.01, 0.99);
  CHECK_FALSE(r.attainable);
}

TEST_CASE("sample size for v=1 against v=0 agrees with Monte Carlo calibration") {
  const auto pu = cosine(0.0);
  const auto pc = cosine(1.0);
  const auto r = required_samples(pu, pc, 0.01, 0.99);
  REQUIRE(r.attainable);
  CHECK(r.dof == 21);
  CHECK(chi_square_power(pu, pc, 0.01, r.events_per_delay) == doctest::Approx(0.99).epsilon(1e-6));

  std::mt19937_64 gen(12345);
  double calibrated = 0.0;
  for (double n = 2.0; n <= 40.0; n += 0.25) {
    if (mc_power(pu, pc, 0.01, n, 4000, gen) >= 0.99) {
      calibrated = n;
      break;
    }
  }
  REQUIRE(calibrated > 0.0);
  CHECK(std::abs(r.events_per_delay / calibrated - 1.0) < 0.25);
}

TEST_CASE("halving the pattern difference quadruples the sample size") {
  const auto pu = cosine(0.0);
  const auto big = required_samples(pu, cosine(0.5), 0.01, 0.99);
  const auto small = required_samples(pu, cosine(0.25), 0.01, 0.99);
  CHECK(std::abs(small.events_per_delay / big.events_per_delay / 4.0 - 1.0) < 0.1);
  std::mt19937_64 gen(777);
  CHECK(mc_power(pu, cosine(0.5), 0.01, big.events_per_delay, 4000, gen) > 0.975);
  CHECK(mc_power(pu, cosine(0.25), 0.01, small.events_per_delay, 4000, gen) > 0.975);
}
