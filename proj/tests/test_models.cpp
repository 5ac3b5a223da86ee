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

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "steersim/analysis.hpp"
#include "steersim/models.hpp"
#include "support.hpp"

using namespace steersim;
using support::code_of;

namespace {

constexpr double kWp = 4.71e15;
constexpr double kSigma = 1.0e13;
constexpr double kW0 = 0.5 * kWp;

Layout energy_layout(double s_f, double s_bd = 20.0, double f_bd = 15.0) {
  Layout l;
  l.path_s_f = s_f;
  l.path_s_bd = s_bd;
  l.dist_f_bd = f_bd;
  l.light_speed = 3.0e8;
  return l;
}

Layout polarization_layout(double s_ad, double s_bd = 20.0) {
  Layout l;
  l.path_s_ad = s_ad;
  l.path_s_bd = s_bd;
  l.dist_f_bd = 10.0;
  l.light_speed = 3.0e8;
  return l;
}

const EnergyEntangledSource& narrow_source() {
  static const auto src = EnergyEntangledSource::degenerate_cw(kWp, kSigma, 5121);
  return src;
}

std::vector<FilterProfile> test_filters(const FrequencyGrid& g) {
  return {FilterProfile::constant(g, 1.0),
          FilterProfile::constant(g, 0.35),
          FilterProfile::gaussian_bandpass(g, kW0, kSigma / 20.0, 1.0),
          FilterProfile::gaussian_bandpass(g, kW0 + 0.8 * kSigma, 0.3 * kSigma, 0.9),
          FilterProfile::gaussian_bandpass(g, kW0, 5.0 * kSigma, 1.0),
          FilterProfile::rectangular(g, kW0 - 0.5 * kSigma, kW0 + 1.5 * kSigma),
          FilterProfile::step(g, kW0 + 0.2 * kSigma),
          FilterProfile::step(g, kW0 - kSigma, false)};
}

}  // namespace

TEST_CASE("unitary singles follow the gaussian closed form") {
  const auto& src = narrow_source();
  const auto f = FilterProfile::gaussian_bandpass(src.grid(), kW0, kSigma / 20.0);
  const auto delays = linspace(2.0 / kSigma, 2.0 / kSigma + 4.0 * std::numbers::pi / kW0, 17);
  const auto pred = predict_energy_scheme(PhysicsModel::unitary(), src, f, energy_layout(10), delays);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    const double t = delays[k];
    const double expected = 0.5 * (1.0 + std::exp(-0.5 * kSigma * kSigma * t * t) * std::cos(kW0 * t));
    CHECK(std::abs(pred.singles_bob.values[k] - expected) < 1e-9);
  }
  CHECK_FALSE(pred.collapse_applies);
  CHECK(pred.branch_patterns.has_value());
  CHECK_FALSE(pred.coincidence.has_value());
}

TEST_CASE("no-signaling: unitary singles ignore the filter and the layout") {
  const auto& src = narrow_source();
  const auto delays = linspace(0.0, 6.0 / kSigma, 31);
  const auto reference =
      predict_energy_scheme(PhysicsModel::unitary(), src, FilterProfile::constant(src.grid(), 1.0), energy_layout(1),
                            delays)
          .singles_bob.values;
  for (const auto& f : test_filters(src.grid())) {
    for (const double s_f : {0.5, 10.0, 19.0, 40.0}) {
      const auto v = predict_energy_scheme(PhysicsModel::unitary(), src, f, energy_layout(s_f), delays);
      CHECK(v.singles_bob.values == reference);
    }
  }
}

TEST_CASE("probability weighting reproduces the unitary singles") {
  const auto& src = narrow_source();
  const auto delays = linspace(0.0, 6.0 / kSigma, 31);
  const auto model = PhysicsModel::collapse(kInfiniteSpeed, 100.0, Weighting::Probability);
  for (const auto& f : test_filters(src.grid())) {
    const auto c = predict_energy_scheme(model, src, f, energy_layout(5), delays);
    const auto u = predict_energy_scheme(PhysicsModel::unitary(), src, f, energy_layout(5), delays);
    CHECK(c.collapse_applies);
    for (std::size_t k = 0; k < delays.size(); ++k) {
      CHECK(std::abs(c.singles_bob.values[k] - u.singles_bob.values[k]) < 1e-10);
    }
  }
}

TEST_CASE("equal weighting changes the singles only when collapse applies") {
  const auto& src = narrow_source();
  const auto f = FilterProfile::gaussian_bandpass(src.grid(), kW0, kSigma / 20.0);
  const std::vector<double> d{5.0 / kSigma, 5.0 / kSigma + std::numbers::pi / kW0};
  const auto model = PhysicsModel::collapse(kInfiniteSpeed, 15.0, Weighting::Equal);
  const auto u = predict_energy_scheme(PhysicsModel::unitary(), src, f, energy_layout(10), d);

  const auto applied = predict_energy_scheme(model, src, f, energy_layout(10), d);
  CHECK(applied.collapse_applies);
  CHECK(applied.ordering.verdict == Ordering::AliceBeforeBob);
  const double p = *applied.transmit_probability;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double expected = 0.5 * applied.branch_patterns->transmitted.values[k] / p +
                            0.5 * applied.branch_patterns->absorbed.values[k] / (1.0 - p);
    CHECK(applied.singles_bob.values[k] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::abs(applied.singles_bob.values[0] - u.singles_bob.values[0]) > 0.1);

  // Ordering gate (condition (3)) and threshold both switch the effect off.
  for (const auto& layout : {energy_layout(25), energy_layout(18, 20, 15)}) {
    const auto off = predict_energy_scheme(model, src, f, layout, d);
    CHECK_FALSE(off.collapse_applies);
    CHECK(off.singles_bob.values == u.singles_bob.values);
  }

  const auto open = predict_energy_scheme(model, src, FilterProfile::constant(src.grid(), 1.0), energy_layout(10), d);
  const auto open_u =
      predict_energy_scheme(PhysicsModel::unitary(), src, FilterProfile::constant(src.grid(), 1.0), energy_layout(10), d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    CHECK(open.singles_bob.values[k] == doctest::Approx(open_u.singles_bob.values[k]).epsilon(1e-14));
  }
}

TEST_CASE("branch weights") {
  const auto eq = PhysicsModel::collapse(kInfiniteSpeed, 1.0, Weighting::Equal);
  const auto pr = PhysicsModel::collapse(kInfiniteSpeed, 1.0, Weighting::Probability);
  CHECK(branch_weights(eq, 0.3) == std::pair{0.5, 0.5});
  CHECK(branch_weights(eq, 0.0) == std::pair{0.0, 1.0});
  CHECK(branch_weights(eq, 1.0) == std::pair{1.0, 0.0});
  CHECK(branch_weights(pr, 0.3) == std::pair{0.3, 0.7});
}

TEST_CASE("KC coincidence: fringes with a narrow filter, flat with a broad one") {
  const auto& src = narrow_source();
  const double tau = 5.0 / kSigma;
  const double sf = kSigma / 20.0;
  const auto narrow = FilterProfile::gaussian_bandpass(src.grid(), kW0, sf);
  const auto t = conditional_bob_spectrum(src, narrow, Branch::Transmitted);
  const double sc = sf * kSigma / std::hypot(sf, kSigma);
  const double envelope = std::abs(degree_of_coherence(t, tau));
  CHECK(std::abs(envelope - std::exp(-0.5 * sc * sc * tau * tau)) < 1e-6);
  CHECK(envelope >= 0.96);
  CHECK(std::abs(envelope - std::exp(-0.03125)) < 1e-4);
  CHECK(std::abs(std::abs(degree_of_coherence(marginal_spectrum(src, Wing::B), tau)) - std::exp(-12.5)) < 1e-9);

  const double period = 2.0 * std::numbers::pi / kW0;
  const auto delays = linspace(tau, tau + period, 21);
  const auto coinc = predict_coincidence_kc(src, narrow, delays);
  CHECK(estimate_visibility(coinc, kW0).v == doctest::Approx(envelope).epsilon(1e-3));
  const auto pred = predict_energy_scheme(PhysicsModel::unitary(), src, narrow, energy_layout(10), delays, true);
  REQUIRE(pred.coincidence.has_value());
  CHECK(pred.coincidence->values == coinc.values);
  CHECK(estimate_visibility(pred.singles_bob, kW0).v <= 1e-4);

  const auto broad = FilterProfile::gaussian_bandpass(src.grid(), kW0, 5.0 * kSigma);
  CHECK(estimate_visibility(predict_coincidence_kc(src, broad, delays), kW0).v < 0.01);

  const auto open = FilterProfile::constant(src.grid(), 1.0);
  const auto c_open = predict_coincidence_kc(src, open, delays);
  const auto s_open = predict_energy_scheme(PhysicsModel::unitary(), src, open, energy_layout(10), delays);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    CHECK(c_open.values[k] == doctest::Approx(s_open.singles_bob.values[k]).epsilon(1e-14));
  }

  // Both backends condition the coincidence channel the same way.
  const auto collapsed =
      predict_energy_scheme(PhysicsModel::collapse(kInfiniteSpeed, 50.0), src, narrow, energy_layout(10), delays, true);
  CHECK(collapsed.coincidence->values == coinc.values);

  CHECK(code_of([&] { predict_coincidence_kc(src, FilterProfile::constant(src.grid(), 0.0), delays); }) ==
        ErrorCode::EmptySpectrum);
}

TEST_CASE("polarization scheme predictions") {
  const PolarizationEntangledSource src{1.0, kW0};
  const double period = 2.0 * std::numbers::pi / kW0;
  const auto delays = linspace(0.0, 2.0 * period, 21);
  const auto collapse = PhysicsModel::collapse(kInfiniteSpeed, 100.0, Weighting::Equal, 1.0);

  const auto before = predict_polarization_scheme(collapse, src, polarization_layout(30), delays);  // (5)
  CHECK(before.ordering.verdict == Ordering::AliceAfterBob);
  CHECK(std::abs(*before.visibility - 1.0) < 1e-9);
  CHECK(std::abs(estimate_visibility(before.singles_bob, kW0).v - 1.0) < 1e-9);

  const auto after = predict_polarization_scheme(collapse, src, polarization_layout(10), delays);  // (6)
  CHECK(after.collapse_applies);
  CHECK(std::abs(*after.visibility) < 1e-9);
  CHECK(estimate_visibility(after.singles_bob, kW0).v < 1e-9);

  for (const double s_ad : {10.0, 30.0}) {
    const auto u = predict_polarization_scheme(PhysicsModel::unitary(), src, polarization_layout(s_ad), delays);
    CHECK(*u.visibility == 0.0);
  }

  for (const double gamma : {0.0, 0.3, 0.75}) {
    const auto m = PhysicsModel::collapse(kInfiniteSpeed, 100.0, Weighting::Equal, gamma);
    const auto p = predict_polarization_scheme(m, src, polarization_layout(30), delays);
    CHECK(std::abs(estimate_visibility(p.singles_bob, kW0).v - gamma) < 1e-9);
  }

  Layout missing;
  missing.path_s_bd = 3.0;
  CHECK(code_of([&] { predict_polarization_scheme(collapse, src, missing, delays); }) == ErrorCode::MissingField);
}

TEST_CASE("reduced polarization state matches the partial trace of a Bell pair") {
  // |phi+> = (|HH> + |VV>)/sqrt2 in the basis HH, HV, VH, VV.
  using C = std::complex<double>;
  const double r = 1.0 / std::numbers::sqrt2;
  const std::array<C, 4> psi{r, 0.0, 0.0, r};
  std::array<std::array<C, 2>, 2> rho_b{};
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      for (int a = 0; a < 2; ++a) rho_b[b1][b2] += psi[2 * a + b1] * std::conj(psi[2 * a + b2]);
    }
  }
  const auto state = bob_polarization_state(PhysicsModel::unitary(), PolarizationEntangledSource{1.0, kW0}, false);
  CHECK(state.hh == doctest::Approx(rho_b[0][0].real()));
  CHECK(state.vv == doctest::Approx(rho_b[1][1].real()));
  CHECK(std::abs(state.hv - rho_b[0][1]) < 1e-15);
  CHECK(state.visibility() == 0.0);

  const auto pre = bob_polarization_state(PhysicsModel::collapse(kInfiniteSpeed, 1.0, Weighting::Equal, 0.6),
                                          PolarizationEntangledSource{0.6, kW0}, false);
  CHECK(pre.visibility() == doctest::Approx(0.6));
}
