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

#include "steersim/error.hpp"
#include "support.hpp"
#include "steersim/geometry.hpp"

using namespace steersim;
using support::code_of;

namespace {

Layout energy_layout(double s_f, double s_bd, double f_bd) {
  Layout l;
  l.path_s_f = s_f;
  l.path_s_bd = s_bd;
  l.dist_f_bd = f_bd;
  l.light_speed = 3.0e8;
  return l;
}


}  // namespace

TEST_CASE("ordering of Alice and Bob paths") {
  CHECK(ordering(energy_layout(10, 20, 15), Scheme::Energy).verdict == Ordering::AliceBeforeBob);
  CHECK(ordering(energy_layout(30, 20, 15), Scheme::Energy).verdict == Ordering::AliceAfterBob);
  CHECK(ordering(energy_layout(20, 20, 15), Scheme::Energy).verdict == Ordering::Simultaneous);
  CHECK(ordering(energy_layout(20 + 1e-10, 20, 15), Scheme::Energy).verdict == Ordering::Simultaneous);

  Layout pol;
  pol.path_s_ad = 5.0;
  pol.path_s_bd = 8.0;
  CHECK(ordering(pol, Scheme::Polarization).verdict == Ordering::AliceBeforeBob);
  CHECK(code_of([&] { ordering(pol, Scheme::Energy); }) == ErrorCode::MissingField);
  CHECK(code_of([&] { ordering(energy_layout(1, 2, 1), Scheme::Polarization); }) == ErrorCode::MissingField);
}

TEST_CASE("ordering is antisymmetric under swapping the paths") {
  for (double a = 0.0; a < 30.0; a += 2.5) {
    for (double b = 0.0; b < 30.0; b += 3.5) {
      const auto ab = ordering(energy_layout(a, b, 0), Scheme::Energy).verdict;
      const auto ba = ordering(energy_layout(b, a, 0), Scheme::Energy).verdict;
      if (ab == Ordering::Simultaneous) {
        CHECK(ba == Ordering::Simultaneous);
      } else {
        CHECK(ab != ba);
        CHECK(ba != Ordering::Simultaneous);
      }
    }
  }
}

TEST_CASE("time of flight and kappa") {
  CHECK(tau_of_flight(27, 15, 3e8) == doctest::Approx(4.0e-8).epsilon(1e-15));
  CHECK(tau_of_flight(27, 27, 3e8) == 0.0);
  CHECK(code_of([] { tau_of_flight(27, 30, 3e8); }) == ErrorCode::NegativeTau);
  CHECK(kappa(12, 4.0e-8) == doctest::Approx(3.0e8).epsilon(1e-15));
  CHECK(kappa(12, 4.0e-12) == doctest::Approx(3.0e12).epsilon(1e-15));
  CHECK(kappa(0, 1e-9) == 0.0);
  CHECK(code_of([] { kappa(12, 0.0); }) == ErrorCode::DivisionByZeroTau);
  CHECK(code_of([] { kappa(12, -1.0); }) == ErrorCode::DivisionByZeroTau);

  // A larger threshold leaves less flight time, so the bound grows with the
  // threshold and falls with tau.
  double previous = kappa(12, tau_of_flight(27, 0.0, 3e8));
  for (double theta = 1.0; theta < 27.0; theta += 1.0) {
    const double k = kappa(12, tau_of_flight(27, theta, 3e8));
    CHECK(k > previous);
    previous = k;
  }
}

TEST_CASE("collapse arrival against detection") {
  const double inf = kInfiniteSpeed;
  CHECK(collapse_arrival_vs_detection(energy_layout(10, 20, 15), inf, 12));
  CHECK_FALSE(collapse_arrival_vs_detection(energy_layout(10, 20, 15), inf, 9));
  CHECK_FALSE(collapse_arrival_vs_detection(energy_layout(30, 20, 15), inf, 100));
  // Exact boundary: the front arrives with the photon.
  auto edge = energy_layout(10, 20, 10);
  CHECK(collapse_arrival_vs_detection(edge, 3.0e8, 10));
  CHECK_FALSE(collapse_arrival_vs_detection(edge, 2.9e8, 10));

  for (double f_bd = 0.0; f_bd <= 30.0; f_bd += 1.5) {
    bool seen = false;
    for (const double k : {1e7, 1e8, 3e8, 1e9, 1e12, inf}) {
      const bool now = collapse_arrival_vs_detection(energy_layout(10, 20, f_bd), k, 15);
      CHECK((!seen || now));
      seen = seen || now;
    }
  }
}

TEST_CASE("optical transit distance") {
  auto l = energy_layout(10, 20, 10);
  l.optical_f_bd = 12.0;
  CHECK(l.collapse_transit() == 10.0);
  l.transit = TransitDistance::Optical;
  CHECK(l.collapse_transit() == 12.0);
  CHECK_FALSE(collapse_arrival_vs_detection(l, 3.0e8, 10));
  l.optical_f_bd.reset();
  CHECK(code_of([&] { l.validate(); }) == ErrorCode::MissingField);
}

TEST_CASE("layout validation") {
  CHECK_NOTHROW(energy_layout(10, 20, 30).validate());
  CHECK(code_of([] { energy_layout(10, 20, 31).validate(); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { energy_layout(-1, 20, 3).validate(); }) == ErrorCode::InvalidArgument);
  auto l = energy_layout(1, 2, 1);
  l.light_speed = 0.0;
  CHECK(code_of([&] { l.validate(); }) == ErrorCode::InvalidArgument);
}
