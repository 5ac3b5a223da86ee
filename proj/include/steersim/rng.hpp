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

#include <array>
#include <cstdint>

namespace steersim {

// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output is a
// function of (counter, key) only, which is what makes parallel batches
// reproducible.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

// Top byte of a stream id names what the stream is used for, the low 56 bits
// index the entity (pair number, pulse number, scan point, ...).
enum class StreamDomain : std::uint8_t {
  Emission = 1,
  Pair = 2,
  DarkA = 3,
  DarkBPlus = 4,
  DarkBMinus = 5,
  Scan = 6,
  Derived = 7,
};

constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(domain) << 56) | (index & ((std::uint64_t{1} << 56) - 1));
}

// A random stream addressed by (seed, stream id, block counter). Two streams
// with different ids never overlap; a stream is fully determined by its
// address, independent of which thread consumes it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  // [0, 1) with 53 random bits.
  double uniform() noexcept;
  // (0, 1], safe for log().
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }
  double normal() noexcept;
  double exponential(double rate) noexcept;
  std::uint64_t poisson(double mean) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Derive an independent 64-bit seed, e.g. one per scan point or per repeat.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace steersim
