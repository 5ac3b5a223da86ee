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

#include <doctest.h>

#include <functional>

#include "steersim/error.hpp"

namespace support {

// Runs f and returns the code of the steersim::Error it throws.
inline steersim::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const steersim::Error& e) {
    return e.code();
  }
  FAIL("expected a steersim::Error");
  return steersim::ErrorCode::InvalidArgument;
}

}  // namespace support
