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

// Constrained-space position sharing.
//
// An attacker who knows where the user can physically be (the MapGrid)
// intersects every obfuscation circle with that map. Generation therefore
// grows each circle until the map-intersected area of c0 ∩ ... ∩ ci is at
// least the area a plain disk of the nominal radius r0*(n-i)/n would have.
// Each share records its own radius, and fusion must walk the chain in
// share order.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "posshare/area.hpp"
#include "posshare/error.hpp"
#include "posshare/geometry.hpp"
#include "posshare/map_grid.hpp"
#include "posshare/random.hpp"
#include "posshare/shares.hpp"

namespace posshare {

// Map-intersected region obtained by fusing k shares.
struct ObfuscationArea {
  std::vector<Circle> circles;  // c0 .. ck
  double area = 0.0;            // area(M ∩ c0 ∩ ... ∩ ck)
};

inline double csps_nominal_radius(double r0, std::size_t n, std::size_t i) noexcept {
  return r0 * static_cast<double>(n - i) / static_cast<double>(n);
}

// Area A_i each prefix of i shares must keep after map intersection.
inline double csps_target_area(double r0, std::size_t n, std::size_t i) noexcept {
  const double r = csps_nominal_radius(r0, n, i);
  return std::numbers::pi * r * r;
}

inline ObfuscationArea fuse_csps(const MapGrid& grid, std::size_t n, const Circle& c0,
                                 std::span<const RefinementShare> shares) {
  detail::require(n >= 1, "fuse_csps: n must be at least 1");
  if (shares.size() > n) {
    throw std::invalid_argument("fuse_csps: more shares than the set contains");
  }
  ObfuscationArea out;
  out.circles.reserve(shares.size() + 1);
  out.circles.push_back(c0);
  Point p = c0.center;
  for (const auto& s : shares) {
    if (!s.radius) throw std::invalid_argument("fuse_csps: share is missing its radius");
    p = p + s.shift;
    out.circles.push_back({p, *s.radius});
  }
  out.area = intersection_area(out.circles, grid);
  return out;
}

inline ObfuscationArea fuse_csps(const MapGrid& grid, const ShareSet& set,
                                 std::span<const RefinementShare> shares) {
  return fuse_csps(grid, set.n(), set.master.circle, shares);
}

struct CspsOptions {
  // Radius growth step; 0 selects r0 / (10 n).
  double growth_step = 0.0;
  std::size_t max_recursion = 64;
  // Per-axis center shift redraws before falling back to no shift.
  std::size_t max_shift_draws = 1'000;
  // Draws for a shift vector that keeps the position inside c_i.
  std::size_t max_share_draws = 100'000;
};

struct RadiusAdjustment {
  Point center;
  double radius = 0.0;
};

namespace detail {

inline bool covers_raster(const MapGrid& grid, const Point& c, double r) {
  const Point lo = grid.min_corner();
  const Point hi = grid.max_corner();
  for (const Point corner : {lo, hi, Point{lo.x, hi.y}, Point{hi.x, lo.y}}) {
    if (!contains(Circle{c, r}, corner)) return false;
  }
  return true;
}

}  // namespace detail

// Grows the circle (center, radius) until grid ∩ prior ∩ circle reaches the
// area of a plain disk of the input radius. After growing, the center is
// moved by a random per-axis offset of at most (grown - original) so the
// pre-growth center cannot be recovered; if that loses area the growth is
// repeated, otherwise the radius is shrunk in `step` increments to the
// smallest compliant value. `keep_inside` stays inside the returned circle.
//
// Throws InfeasibleError when the map cannot supply the area.
template <std::uniform_random_bit_generator G>
RadiusAdjustment increase_radius(double radius, Point center, double step,
                                 std::span<const Circle> prior, const MapGrid& grid,
                                 Point keep_inside, G& rng, const CspsOptions& opts = {}) {
  detail::require(std::isfinite(step) && step > 0.0, "increase_radius: step must be positive");
  detail::require(std::isfinite(radius) && radius >= 0.0,
                  "increase_radius: radius must be non-negative");

  const double original = radius;
  const double target = std::numbers::pi * original * original;

  std::vector<Circle> circles(prior.begin(), prior.end());
  circles.push_back({center, radius});
  auto area_at = [&](const Point& p, double r) {
    circles.back() = Circle{p, r};
    return intersection_area(circles, grid);
  };

  Point p = center;
  double r = radius;
  if (area_at(p, r) >= target) return {p, r};

  for (std::size_t depth = 0;; ++depth) {
    if (depth > opts.max_recursion) {
      throw InfeasibleError("radius increase did not converge; map declared infeasible");
    }
    while (area_at(p, r) < target) {
      if (detail::covers_raster(grid, p, r)) {
        throw InfeasibleError("map has too little feasible area for the requested radius");
      }
      r += step;
    }

    const double bound = r - original;
    Vector shift;
    for (std::size_t draw = 0; draw < opts.max_shift_draws; ++draw) {
      const Vector candidate{uniform_real(rng, -bound, bound),
                             uniform_real(rng, -bound, bound)};
      if (contains(Circle{p + candidate, r}, keep_inside)) {
        shift = candidate;
        break;
      }
    }
    p = p + shift;

    if (area_at(p, r) < target) continue;

    while (r - step > 0.0 && area_at(p, r) > target) r -= step;
    r += step;
    r = std::max(r, distance(p, keep_inside));
    return {p, r};
  }
}

// Generates a map-aware share set for `pi`. The master circle and every
// intermediate circle satisfy area(grid ∩ c0 ∩ ... ∩ ci) >= csps_target_area
// (r0, n, i). Refinement shares carry their radii; the closing share has
// radius 0.
template <std::uniform_random_bit_generator G>
ShareSet generate_csps(std::size_t n, const MapGrid& grid, double r0, Point pi, G& rng,
                       const CspsOptions& opts = {}) {
  detail::require(pi.finite(), "generate_csps: position must be finite");
  detail::require(n >= 1, "generate_csps: n must be at least 1");
  detail::require(std::isfinite(r0) && r0 > 0.0, "generate_csps: r0 must be positive");
  detail::require(grid.feasible(pi), "generate_csps: position must lie on a feasible map cell");

  if (grid.true_area() < csps_target_area(r0, n, n - 1)) {
    throw InfeasibleError("map feasible area is smaller than the finest target area");
  }
  const double step =
      opts.growth_step > 0.0 ? opts.growth_step : r0 / (10.0 * static_cast<double>(n));

  std::vector<Circle> circles;
  circles.reserve(n);

  Circle c0{pi + random_in_disk(rng, r0), r0};
  if (intersection_area(std::span<const Circle>(&c0, 1), grid) < csps_target_area(r0, n, 0)) {
    const auto adj = increase_radius(r0, c0.center, step, {}, grid, pi, rng, opts);
    c0 = {adj.center, adj.radius};
  }
  while (!contains(c0, pi)) c0.radius = std::nextafter(c0.radius, c0.radius + 1.0);
  circles.push_back(c0);

  std::vector<RefinementShare> shares;
  shares.reserve(n);
  for (std::size_t i = 1; i < n; ++i) {
    const double ri = csps_nominal_radius(r0, n, i);
    const Circle prev = circles.back();

    bool found = false;
    Circle ci;
    for (std::size_t draw = 0; draw < opts.max_share_draws; ++draw) {
      const Vector s = random_bounded_vector(rng, 2.0 * prev.radius);
      if (contains(Circle{prev.center + s, ri}, pi)) {
        ci = {prev.center + s, ri};
        found = true;
        break;
      }
    }
    if (!found) throw InfeasibleError("could not place a shift vector keeping the position inside");

    circles.push_back(ci);
    if (intersection_area(circles, grid) < csps_target_area(r0, n, i)) {
      circles.pop_back();
      const auto adj = increase_radius(ri, ci.center, step, circles, grid, pi, rng, opts);
      ci = {adj.center, adj.radius};
      circles.push_back(ci);
    }
    // Store the center fusion will rebuild from the shift; growth can leave
    // pi exactly on the perimeter, where rounding may push it outside.
    const Vector shift = ci.center - prev.center;
    ci.center = prev.center + shift;
    while (!contains(ci, pi)) ci.radius = std::nextafter(ci.radius, ci.radius + 1.0);
    circles.back() = ci;
    shares.push_back({shift, ci.radius});
  }
  shares.push_back({pi - circles.back().center, 0.0});

  ShareSet set;
  set.mode = Mode::csps;
  set.master = MasterShare{circles.front()};
  set.refinements = std::move(shares);
  set.delta_r = r0 / static_cast<double>(n);
  return set;
}

}  // namespace posshare
