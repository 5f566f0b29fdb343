// Copyright 2026 The Tidy Authors.
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

#ifndef TIDY_RNG_H_
#define TIDY_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace tidy {

// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed of the `index`-th child stream of `master`: the (index+1)-th output of
// a SplitMix64 generator started at `master`.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

// Seeded generator with distributions built directly on the raw 64-bit
// engine output, so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);

  // Standard normal via Box-Muller (one draw per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace tidy

#endif  // TIDY_RNG_H_
