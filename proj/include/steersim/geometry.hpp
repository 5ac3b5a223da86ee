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

// Experiment layout and time-of-flight bookkeeping.
//
// The collapse front model: the A photon reaches Alice's projective element
// at light speed along its optical path, then the influence travels the
// straight-line distance to Bob's detector at speed kappa. Lengths are
// metres, times seconds.

#include <cstdint>
#include <limits>
#include <optional>

namespace steersim {

enum class Scheme : std::uint8_t { Energy, Polarization };

// Which F->BD distance the collapse front travels.
enum class TransitDistance : std::uint8_t { Spatial, Optical };

// Path comparisons treat lengths within this many metres as equal.
inline constexpr double kLengthTolerance = 1e-9;

inline constexpr double kInfiniteSpeed = std::numeric_limits<double>::infinity();

struct Layout {
  std::optional<double> path_s_f;   // source -> filter (energy scheme)
  std::optional<double> path_s_ad;  // source -> Alice's detector
  double path_s_bd = 0.0;           // source -> Bob's detector
  double dist_f_bd = 0.0;           // straight-line Alice element -> Bob's detector
  std::optional<double> optical_f_bd;
  TransitDistance transit = TransitDistance::Spatial;
  double light_speed = 299'792'458.0;

  // Throws InvalidArgument on negative lengths, non-positive light speed or a
  // spatial distance longer than the source-mediated optical route.
  void validate() const;

  // Alice-side path compared against path_s_bd: path_s_f for the energy
  // scheme, path_s_ad for the polarization scheme. Throws MissingField.
  double alice_path(Scheme scheme) const;

  // Optical length from source to Alice's detector, for timestamps. Falls
  // back to path_s_f when no detector path is given.
  double alice_detector_path(Scheme scheme) const;

  // Distance the collapse front covers after Alice's element.
  double collapse_transit() const;
};

enum class Ordering : std::uint8_t { AliceAfterBob, AliceBeforeBob, Simultaneous };

struct OrderingVerdict {
  Scheme scheme;
  Ordering verdict;
};

OrderingVerdict ordering(const Layout& layout, Scheme scheme);

// (path_s_bd - threshold) / light_speed. Throws NegativeTau when the
// threshold exceeds the Bob path.
double tau_of_flight(double path_s_bd, double threshold_s_f, double light_speed);

// dist_f_bd / tau. Throws DivisionByZeroTau for tau <= 0.
double kappa(double dist_f_bd, double tau);

// True when the collapse front generated at Alice's element reaches Bob's
// detector no later than the B photon does, and Alice's element sits within
// the threshold distance d_tau. Arrival exactly at detection counts.
bool collapse_arrival_vs_detection(const Layout& layout, Scheme scheme, double kappa_model, double d_tau);
inline bool collapse_arrival_vs_detection(const Layout& layout, double kappa_model, double d_tau) {
  return collapse_arrival_vs_detection(layout, Scheme::Energy, kappa_model, d_tau);
}

const char* to_string(Ordering ordering) noexcept;
const char* to_string(Scheme scheme) noexcept;

}  // namespace steersim
