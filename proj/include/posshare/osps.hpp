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

// Open-space position sharing: homogeneous shares, no map knowledge.
//
// A share set is a master circle c0 = (p0, r0) plus n shift vectors. Fusing
// any k of the shifts moves the center by their sum and shrinks the radius
// by k * r0/n, so precision depends only on how many shares are known.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "posshare/error.hpp"
#include "posshare/geometry.hpp"
#include "posshare/random.hpp"
#include "posshare/shares.hpp"

namespace posshare {

// Radius left after fusing k of n homogeneous shares. Exactly 0 at k == n.
inline double osps_radius(double r0, std::size_t n, std::size_t k) noexcept {
  return r0 * static_cast<double>(n - k) / static_cast<double>(n);
}

// Fuses the master share with any k <= n refinement shares. The shifts are
// summed in a canonical order, so the result is bit-identical for every
// permutation of the same shares.
inline Circle fuse_osps(std::size_t n, const MasterShare& master,
                        std::span<const RefinementShare> shares) {
  detail::require(n >= 1, "fuse_osps: n must be at least 1");
  if (shares.size() > n) {
    throw std::invalid_argument("fuse_osps: more shares than the set contains");
  }
  std::vector<Vector> shifts;
  shifts.reserve(shares.size());
  for (const auto& s : shares) shifts.push_back(s.shift);
  std::sort(shifts.begin(), shifts.end(), [](const Vector& a, const Vector& b) {
    return a.dx != b.dx ? a.dx < b.dx : a.dy < b.dy;
  });
  Point center = master.circle.center;
  for (const auto& v : shifts) center = center + v;
  return {center, osps_radius(master.circle.radius, n, shares.size())};
}

inline Circle fuse_osps(const ShareSet& set, std::span<const RefinementShare> shares) {
  return fuse_osps(set.n(), set.master, shares);
}

struct OspsLimits {
  // Chain attempts from one master center before drawing a new one.
  std::size_t max_chain_attempts = 10'000;
  // Draws per shift vector before the chain attempt is abandoned.
  std::size_t max_vector_draws = 10'000;
};

namespace detail {

// Half-width of the arc of directions u for which |len * u - q| <= r, where
// |q| = d; 0 when no direction works and pi when all do.
inline double accepted_arc(double len, double d, double r) noexcept {
  if (len + d <= r) return std::numbers::pi;
  if (std::abs(len - d) > r) return 0.0;
  const double c = (len * len + d * d - r * r) / (2.0 * len * d);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Draws s with length uniform in [0, max_len] and direction uniform,
// conditioned on |s - q| <= r. Instead of rejecting whole proposals, the
// length is drawn from its conditional density (proportional to the
// accepted arc) and the direction uniformly within that arc, which gives
// the same distribution at a bounded cost even when the accepted set is a
// sliver. Returns nullopt if rounding leaves no usable draw.
template <std::uniform_random_bit_generator G>
std::optional<Vector> draw_shift_toward(G& rng, const Vector& q, double max_len, double r,
                                        std::size_t max_draws) {
  const double d = q.norm();
  const double heading = std::atan2(q.dy, q.dx);
  const double lo = std::max(0.0, d - r);
  if (lo > max_len) return std::nullopt;
  // The arc width is unimodal in the length, peaking at sqrt(d^2 - r^2).
  const double peak = std::clamp(std::sqrt(std::max(0.0, d * d - r * r)), lo, max_len);
  const double widest = accepted_arc(peak, d, r);
  auto shift = [&](double len, double angle) {
    return Vector{len * std::cos(angle), len * std::sin(angle)};
  };
  auto fits = [&](const Vector& s) {
    const double ex = s.dx - q.dx, ey = s.dy - q.dy;
    return ex * ex + ey * ey <= r * r;
  };
  if (widest > 0.0) {
    for (std::size_t draw = 0; draw < max_draws; ++draw) {
      const double len = uniform_real(rng, lo, max_len);
      const double arc = accepted_arc(len, d, r);
      if (uniform_real(rng, 0.0, widest) >= arc) continue;
      const Vector s = shift(len, heading + uniform_real(rng, -arc, arc));
      if (fits(s)) return s;
    }
  }
  const Vector s = shift(peak, heading);
  if (fits(s)) return s;
  return std::nullopt;
}

}  // namespace detail

// Generates a master share around `pi` and n refinement shares whose chain
// ends exactly on `pi`. Every intermediate circle keeps `pi` inside and
// every shift is at most r0/n long.
template <std::uniform_random_bit_generator G>
ShareSet generate_osps(Point pi, std::size_t n, double r0, G& rng,
                       OspsLimits limits = {}) {
  detail::require(pi.finite(), "generate_osps: position must be finite");
  detail::require(n >= 1, "generate_osps: n must be at least 1");
  detail::require(std::isfinite(r0) && r0 > 0.0, "generate_osps: r0 must be positive");

  const double delta_r = r0 / static_cast<double>(n);
  std::vector<RefinementShare> shares;
  shares.reserve(n);

  for (;;) {
    const Point p0 = pi + random_in_disk(rng, r0);

    for (std::size_t attempt = 0; attempt < limits.max_chain_attempts; ++attempt) {
      shares.clear();
      Point p = p0;
      bool chain_ok = true;
      for (std::size_t i = 1; i < n && chain_ok; ++i) {
        const auto s = detail::draw_shift_toward(rng, pi - p, delta_r, osps_radius(r0, n, i),
                                                 limits.max_vector_draws);
        chain_ok = s.has_value();
        if (chain_ok) {
          shares.push_back({*s, std::nullopt});
          p = p + *s;
        }
      }
      if (!chain_ok || distance(p, pi) > delta_r) continue;

      shares.push_back({pi - p, std::nullopt});
      ShareSet set;
      set.mode = Mode::osps;
      set.master = MasterShare{Circle{p0, r0}};
      set.refinements = std::move(shares);
      set.delta_r = delta_r;
      return set;
    }
  }
}

}  // namespace posshare
