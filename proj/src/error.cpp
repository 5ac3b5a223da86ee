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

#include "steersim/error.hpp"

namespace steersim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::AliasingRisk: return "AliasingRisk";
    case ErrorCode::UnsupportedSource: return "UnsupportedSource";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::NegativeTau: return "NegativeTau";
    case ErrorCode::DivisionByZeroTau: return "DivisionByZeroTau";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IncompatibleScheme: return "IncompatibleScheme";
    case ErrorCode::NoHeralds: return "NoHeralds";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace steersim
