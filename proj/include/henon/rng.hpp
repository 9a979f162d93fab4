// Copyright 2026 The HenonNets Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HENON_RNG_HPP
#define HENON_RNG_HPP

#include <cstdint>
#include <random>

namespace henon {

// Seedable generator whose output is identical on every platform.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++ standard.
// Real numbers are produced from the top 53 bits of each draw,
// u = (x >> 11) * 2^-53, and mapped affinely onto [lo, hi]. The standard
// distributions are not used because their algorithms differ between
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace henon

#endif  // HENON_RNG_HPP
