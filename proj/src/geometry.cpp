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

#include "steersim/geometry.hpp"

#include <cmath>

#include "steersim/error.hpp"

namespace steersim {

void Layout::validate() const {
  auto non_negative = [](std::optional<double> v, const char* name) {
    if (v && !(*v >= 0.0 && std::isfinite(*v))) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a finite length >= 0");
    }
  };
  non_negative(path_s_f, "path_s_f");
  non_negative(path_s_ad, "path_s_ad");
  non_negative(path_s_bd, "path_s_bd");
  non_negative(dist_f_bd, "dist_f_bd");
  non_negative(optical_f_bd, "optical_f_bd");
  if (!(light_speed > 0.0) || !std::isfinite(light_speed)) {
    throw Error(ErrorCode::InvalidArgument, "light_speed must be positive");
  }
  const auto alice = path_s_f ? path_s_f : path_s_ad;
  if (alice && dist_f_bd > *alice + path_s_bd + kLengthTolerance) {
    throw Error(ErrorCode::InvalidArgument, "dist_f_bd exceeds path_s_f + path_s_bd");
  }
  if (transit == TransitDistance::Optical && !optical_f_bd) {
    throw Error(ErrorCode::MissingField, "optical transit selected but optical_f_bd is not set");
  }
}

double Layout::alice_path(Scheme scheme) const {
  if (scheme == Scheme::Energy) {
    if (!path_s_f) throw Error(ErrorCode::MissingField, "energy scheme needs path_s_f");
    return *path_s_f;
  }
  if (!path_s_ad) throw Error(ErrorCode::MissingField, "polarization scheme needs path_s_ad");
  return *path_s_ad;
}

double Layout::alice_detector_path(Scheme scheme) const {
  if (path_s_ad) return *path_s_ad;
  return alice_path(scheme);
}

double Layout::collapse_transit() const {
  if (transit == TransitDistance::Optical) {
    if (!optical_f_bd) throw Error(ErrorCode::MissingField, "optical_f_bd is not set");
    return *optical_f_bd;
  }
  return dist_f_bd;
}

OrderingVerdict ordering(const Layout& layout, Scheme scheme) {
  const double alice = layout.alice_path(scheme);
  const double diff = alice - layout.path_s_bd;
  if (std::fabs(diff) <= kLengthTolerance) return {scheme, Ordering::Simultaneous};
  return {scheme, diff < 0.0 ? Ordering::AliceBeforeBob : Ordering::AliceAfterBob};
}

double tau_of_flight(double path_s_bd, double threshold_s_f, double light_speed) {
  if (!(light_speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "light speed must be positive");
  if (!(threshold_s_f >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold distance must be >= 0");
  if (path_s_bd < threshold_s_f) {
    throw Error(ErrorCode::NegativeTau, "threshold distance exceeds the source-to-Bob path");
  }
  return (path_s_bd - threshold_s_f) / light_speed;
}

double kappa(double dist_f_bd, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::DivisionByZeroTau, "collapse time of flight must be positive");
  return dist_f_bd / tau;
}

bool collapse_arrival_vs_detection(const Layout& layout, Scheme scheme, double kappa_model, double d_tau) {
  if (!(kappa_model > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa_model must be positive");
  if (!(d_tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "d_tau must be >= 0");
  const double alice = layout.alice_path(scheme);
  if (alice > d_tau + kLengthTolerance) return false;
  // Compare in length units: the front's travel expressed as optical length.
  const double front = std::isinf(kappa_model) ? 0.0 : layout.collapse_transit() * (layout.light_speed / kappa_model);
  return alice + front <= layout.path_s_bd + kLengthTolerance;
}

const char* to_string(Ordering ordering) noexcept {
  switch (ordering) {
    case Ordering::AliceAfterBob: return "alice_after_bob";
    case Ordering::AliceBeforeBob: return "alice_before_bob";
    case Ordering::Simultaneous: return "simultaneous";
  }
  return "unknown";
}

const char* to_string(Scheme scheme) noexcept {
  return scheme == Scheme::Energy ? "energy" : "polarization";
}

}  // namespace steersim
