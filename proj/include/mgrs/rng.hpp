// Copyright 2026 The mgrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "mgrs/common.hpp"

namespace mgrs {

/// splitmix64 generator. The u64 / uniform streams are pure integer
/// arithmetic plus a multiply by 2^-53, so identical seeds give identical
/// streams on every platform.
///
/// Stream discipline: every consumer derives its own named sub-stream with
/// fork(name) instead of sharing one generator, so adding a consumer never
/// shifts another consumer's stream. Per-sample generators are derived as
/// stream_seed ^ sample_index.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n). n must be > 0.
  int64_t next_index(int64_t n) {
    return static_cast<int64_t>(next_u64() % static_cast<uint64_t>(n));
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double next_normal() {
    double u1 = next_double();
    double u2 = next_double();
    // log(1-u1) is finite for u1 in [0,1).
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Named sub-stream: a fresh generator whose seed mixes this stream's
  /// seed with the consumer name.
  Rng fork(std::string_view name) const {
    uint64_t h = fnv1a64(name.data(), name.size());
    Rng mixer(state_ ^ h);
    return Rng(mixer.next_u64());
  }

  /// Per-sample generator within this stream: seed ^ sample_index.
  /// splitmix64 decorrelates adjacent seeds, so nearby indices are fine.
  Rng at_index(uint64_t index) const { return Rng(state_ ^ index); }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

}  // namespace mgrs
