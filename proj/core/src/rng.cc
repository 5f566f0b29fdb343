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

#include "tidy/rng.h"

#include <cmath>
#include <numbers>

namespace tidy {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master + index * 0x9E3779B97F4A7C15ULL;
  return splitmix64(state);
}

std::size_t Rng::index(std::size_t n) {
  // Lemire's multiply-shift; the bias for table-sized n is below 2^-50.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
  return static_cast<std::size_t>(wide >> 64);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tidy
