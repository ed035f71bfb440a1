// Copyright 2026 The posshare Authors
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
#include <numbers>
#include <random>

#include "posshare/geometry.hpp"

namespace posshare {

// Default engine. Every randomized operation takes its generator by
// reference so callers control seeding.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20150615;

template <std::uniform_random_bit_generator G>
double uniform_real(G& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <std::uniform_random_bit_generator G>
std::size_t uniform_index(G& rng, std::size_t count) {
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

template <std::uniform_random_bit_generator G>
bool coin_flip(G& rng) {
  return std::bernoulli_distribution(0.5)(rng);
}

// Area-uniform offset inside a disk, by rejection from the bounding square.
template <std::uniform_random_bit_generator G>
Vector random_in_disk(G& rng, double radius) {
  if (!(radius > 0.0)) return {};
  for (;;) {
    const double dx = uniform_real(rng, -radius, radius);
    const double dy = uniform_real(rng, -radius, radius);
    if (dx * dx + dy * dy <= radius * radius) return {dx, dy};
  }
}

// Length uniform in [0, max_length], direction uniform in [0, 2*pi).
template <std::uniform_random_bit_generator G>
Vector random_bounded_vector(G& rng, double max_length) {
  const double length = uniform_real(rng, 0.0, max_length);
  const double angle = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
  return {length * std::cos(angle), length * std::sin(angle)};
}

}  // namespace posshare
