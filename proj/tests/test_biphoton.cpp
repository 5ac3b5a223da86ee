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

#include "oracles.hpp"
#include "steersim/biphoton.hpp"
#include "steersim/error.hpp"

using namespace steersim;

namespace {

constexpr double kWp = 4.71e15;
constexpr double kSigma = 1.0e13;

double normal_cdf(double x, double mu, double sigma) { return oracle::std_normal_cdf((x - mu) / sigma); }

}  // namespace

TEST_CASE("degenerate CW marginals coincide") {
  const auto src = EnergyEntangledSource::degenerate_cw(kWp, kSigma, 513);
  CHECK(src.is_cw());
  const auto a = marginal_spectrum(src, Wing::A);
  const auto b = marginal_spectrum(src, Wing::B);
  CHECK(a.grid().omega_min() == doctest::Approx(b.grid().omega_min()).epsilon(1e-15));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  CHECK(worst <= 1e-12 * a.max_density());
  CHECK(a.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-degenerate CW marginal is mirrored about the pump half-frequency") {
  const double delta = 1.5 * kSigma;
  const auto grid = FrequencyGrid::centered(0.5 * kWp + delta, 8.0 * kSigma, 513);
  const EnergyEntangledSource src(kWp, 0.0, 0.5 * kWp + delta, kSigma, grid);
  const auto b = marginal_spectrum(src, Wing::B);
  CHECK(std::abs(b.mean() - (0.5 * kWp - delta)) < 1e-9 * kSigma * 1e3);
  CHECK(b.stddev() == doctest::Approx(kSigma).epsilon(1e-9));
  CHECK(src.center_of(Wing::B) == doctest::Approx(0.5 * kWp - delta));
}

TEST_CASE("source validation") {
  const auto grid = FrequencyGrid::centered(0.5 * kWp, 8.0 * kSigma, 513);
  CHECK_THROWS_AS(EnergyEntangledSource(kWp, -1.0, 0.5 * kWp, kSigma, grid), Error);
  try {
    EnergyEntangledSource(kWp, 0.0, 0.5 * kWp, kSigma / 4.0, grid);
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooCoarse);
  }
  try {
    EnergyEntangledSource(kWp, 0.0, 0.5 * kWp + 4.0 * kSigma, kSigma, grid);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
  PolarizationEntangledSource p{1.5, 1e15};
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("finite pump bandwidth marginal width matches a brute-force joint integral") {
  const double sp = 0.5 * kSigma;
  const auto grid = FrequencyGrid::centered(0.5 * kWp, 8.0 * kSigma, 513);
  const EnergyEntangledSource src(kWp, sp, 0.5 * kWp, kSigma, grid);
  const auto b = marginal_spectrum(src, Wing::B);
  const auto a = marginal_spectrum(src, Wing::A);

  // Brute force: B marginal on a 3x refined square grid.
  const std::size_t n = 1537;
  const double lo = grid.omega_min();
  const double h = (grid.omega_max() - lo) / static_cast<double>(n - 1);
  const double lo_b = kWp - grid.omega_max();
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dwb = h * static_cast<double>(j);  // offset from lo_b
    double marg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dwa = h * static_cast<double>(i);
      const double pump = ((lo + dwa) - 0.5 * kWp) + (lo_b + dwb - 0.5 * kWp);
      const double pm = (lo + dwa) - 0.5 * kWp;
      marg += std::exp(-0.5 * pump * pump / (sp * sp)) * std::exp(-0.5 * pm * pm / (kSigma * kSigma));
    }
    const double x = (lo_b - 0.5 * kWp) + dwb;
    m0 += marg;
    m1 += marg * x;
    m2 += marg * x * x;
  }
  const double mean = m1 / m0;
  const double width = std::sqrt(m2 / m0 - mean * mean);
  CHECK(std::abs(b.stddev() / width - 1.0) < 1e-6);
  CHECK(std::abs(width / std::hypot(kSigma, sp) - 1.0) < 1e-6);
  CHECK(std::abs(a.stddev() / kSigma - 1.0) < 1e-6);
  CHECK(src.width_of(Wing::B) == doctest::Approx(std::hypot(kSigma, sp)));
}

TEST_CASE("conditional Bob spectra") {
  const double sf = kSigma / 20.0;
  const double delta = 0.5 * kSigma;
  const auto src = EnergyEntangledSource::degenerate_cw(kWp, kSigma, 5121);
  const auto& grid = src.grid();
  const auto marginal = marginal_spectrum(src, Wing::B);

  SUBCASE("transparent filter") {
    const auto open = FilterProfile::constant(grid, 1.0);
    const auto t = conditional_bob_spectrum(src, open, Branch::Transmitted);
    const auto a = conditional_bob_spectrum(src, open, Branch::Absorbed);
    CHECK(a.is_empty());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(t[i] == marginal[i]);
  }

  SUBCASE("narrow bandpass selects the mirrored frequency") {
    const auto f = FilterProfile::gaussian_bandpass(grid, 0.5 * kWp + delta, sf, 1.0);
    const auto t = conditional_bob_spectrum(src, f, Branch::Transmitted);
    const auto a = conditional_bob_spectrum(src, f, Branch::Absorbed);
    const double s2 = kSigma * kSigma + sf * sf;
    const double width = sf * kSigma / std::sqrt(s2);
    const double center_a = 0.5 * kWp + delta * kSigma * kSigma / s2;
    CHECK(std::abs(t.stddev() / width - 1.0) < 1e-6);
    CHECK(std::abs(t.mean() - (kWp - center_a)) < 1e-6 * width);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(t[i] + a[i] - marginal[i]));
    CHECK(worst <= 1e-12 * marginal.max_density());

    const double p_a = transmit_probability(marginal_spectrum(src, Wing::A), f);
    CHECK(std::abs(t.total_weight() / marginal.total_weight() - p_a) < 1e-9);
  }

  SUBCASE("finite pump goes through the joint path") {
    const auto pumped_grid = FrequencyGrid::centered(0.5 * kWp, 8.0 * kSigma, 1537);
    const EnergyEntangledSource pumped(kWp, 0.2 * kSigma, 0.5 * kWp, kSigma, pumped_grid);
    const auto f = FilterProfile::gaussian_bandpass(pumped_grid, 0.5 * kWp + delta, 0.5 * kSigma, 1.0);
    CHECK_THROWS_AS(conditional_bob_spectrum(pumped, f, Branch::Transmitted), Error);
    const auto t = conditional_bob_spectrum_joint(pumped, f, Branch::Transmitted);
    const auto a = conditional_bob_spectrum_joint(pumped, f, Branch::Absorbed);
    const auto m = marginal_spectrum(pumped, Wing::B);
    CHECK(std::abs((t.total_weight() + a.total_weight()) / m.total_weight() - 1.0) < 1e-9);
    const double p_a = transmit_probability(marginal_spectrum(pumped, Wing::A), f);
    CHECK(std::abs(t.total_weight() / m.total_weight() - p_a) < 1e-6);
  }
}

TEST_CASE("pair sampling") {
  const double delta = 0.25 * kSigma;
  const auto grid = FrequencyGrid::centered(0.5 * kWp + delta, 8.0 * kSigma, 513);
  const EnergyEntangledSource src(kWp, 0.0, 0.5 * kWp + delta, kSigma, grid);
  const int n = 1000000;
  RandomStream s(5, 5);
  std::vector<double> observed(40, 0.0);
  double sum = 0.0;
  bool conserved = true;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_pair(src, s);
    conserved = conserved && std::abs(p.omega_a + p.omega_b - kWp) <= 1e-9 * kWp;
    const double z = (p.omega_a - src.signal_center()) / kSigma;
    sum += z;
    const int bin = static_cast<int>(std::floor((z + 4.0) / 0.2));
    if (bin >= 0 && bin < 40) observed[static_cast<std::size_t>(bin)] += 1.0;
  }
  CHECK(conserved);
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  std::vector<double> expected(40);
  for (std::size_t k = 0; k < 40; ++k) {
    const double lo = -4.0 + 0.2 * static_cast<double>(k);
    expected[k] = n * (normal_cdf(lo + 0.2, 0.0, 1.0) - normal_cdf(lo, 0.0, 1.0));
  }
  // Level 0.01: a correct sampler fails this for 1 seed in 100. The seed is
  // fixed, so the outcome is reproducible.
  CHECK(oracle::pearson_gof_p_value(observed, expected) > 0.01);

  RandomStream r1(8, 1);
  RandomStream r2(8, 1);
  for (int i = 0; i < 100; ++i) CHECK(sample_pair(src, r1).omega_a == sample_pair(src, r2).omega_a);
}

TEST_CASE("branch-conditioned sampling follows the filtered distribution") {
  const auto src = EnergyEntangledSource::degenerate_cw(kWp, kSigma, 1025);
  const double sf = 0.5 * kSigma;
  const double c = 0.5 * kWp + 0.7 * kSigma;
  const auto f = FilterProfile::gaussian_bandpass(src.grid(), c, sf, 1.0);
  RandomStream s(3, 3);
  const int n = 200000;
  double m = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_pair_in_branch(src, f, Branch::Transmitted, s).omega_a - 0.5 * kWp;
    m += x;
    m2 += x * x;
  }
  m /= n;
  const double sd = std::sqrt(m2 / n - m * m);
  const double s2 = kSigma * kSigma + sf * sf;
  const double width = sf * kSigma / std::sqrt(s2);
  const double mean = 0.7 * kSigma * kSigma * kSigma / s2;
  CHECK(std::abs(m - mean) < 5.0 * width / std::sqrt(n));
  CHECK(std::abs(sd / width - 1.0) < 5.0 / std::sqrt(2.0 * n));
  CHECK_THROWS_AS(sample_pair_in_branch(src, FilterProfile::constant(src.grid(), 0.0), Branch::Transmitted, s),
                  Error);
}
