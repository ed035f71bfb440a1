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

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "posshare/geometry.hpp"

namespace posshare {

enum class Mode { osps, csps };

inline constexpr std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::osps ? "OSPS" : "CSPS";
}

// Public anchor of a share chain: the coarsest obfuscation circle c0.
struct MasterShare {
  Circle circle;

  friend bool operator==(const MasterShare&, const MasterShare&) = default;
};

// Relative shift of the obfuscation circle's center. Map-aware shares also
// carry the radius of the circle they produce.
struct RefinementShare {
  Vector shift;
  std::optional<double> radius;

  friend bool operator==(const RefinementShare&, const RefinementShare&) = default;
};

// One master share and the n refinement shares generated for a precise
// position. Following the master center through all shifts lands on that
// position.
struct ShareSet {
  Mode mode = Mode::osps;
  MasterShare master;
  std::vector<RefinementShare> refinements;
  // Nominal precision gained per refinement share (r0 / n).
  double delta_r = 0.0;

  std::size_t n() const noexcept { return refinements.size(); }

  // p0 + sum of all shifts.
  Point chain_end() const noexcept {
    Point p = master.circle.center;
    for (const auto& s : refinements) p = p + s.shift;
    return p;
  }

  friend bool operator==(const ShareSet&, const ShareSet&) = default;
};

inline Vector sum_of_shifts(const std::vector<RefinementShare>& shares) noexcept {
  Vector total;
  for (const auto& s : shares) total += s.shift;
  return total;
}

}  // namespace posshare
