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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

#include "posshare/geometry.hpp"
#include "posshare/map_grid.hpp"

namespace posshare {

// Rasterized area of a circle intersection. A cell counts when its center
// lies inside every circle (boundary inclusive) and, with a map, the cell
// itself is feasible. Each raster row is resolved analytically as the
// intersection of the circles' chords, so the cost is O(rows * circles)
// rather than O(cells).

namespace detail {

struct Lattice {
  double origin_x;
  double origin_y;
  double cell;
  std::int64_t row_min;
  std::int64_t row_max;
  std::int64_t col_min;
  std::int64_t col_max;
};

template <class CountRow>
std::uint64_t count_cells(std::span<const Circle> circles, const Lattice& lat,
                          CountRow&& count_row) {
  double y_lo = -std::numeric_limits<double>::infinity();
  double y_hi = std::numeric_limits<double>::infinity();
  for (const auto& c : circles) {
    y_lo = std::max(y_lo, c.center.y - c.radius);
    y_hi = std::min(y_hi, c.center.y + c.radius);
  }
  if (y_lo > y_hi) return 0;

  const auto first_row = std::max<std::int64_t>(
      lat.row_min,
      static_cast<std::int64_t>(std::ceil((y_lo - lat.origin_y) / lat.cell - 0.5)));
  const auto last_row = std::min<std::int64_t>(
      lat.row_max,
      static_cast<std::int64_t>(std::floor((y_hi - lat.origin_y) / lat.cell - 0.5)));

  std::uint64_t total = 0;
  for (std::int64_t row = first_row; row <= last_row; ++row) {
    const double yc = lat.origin_y + (static_cast<double>(row) + 0.5) * lat.cell;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool empty = false;
    for (const auto& c : circles) {
      const double dy = yc - c.center.y;
      const double rem = c.radius * c.radius - dy * dy;
      if (rem < 0.0) {
        empty = true;
        break;
      }
      const double half = std::sqrt(rem);
      lo = std::max(lo, c.center.x - half);
      hi = std::min(hi, c.center.x + half);
    }
    if (empty || lo > hi) continue;
    const auto first_col = std::max<std::int64_t>(
        lat.col_min,
        static_cast<std::int64_t>(std::ceil((lo - lat.origin_x) / lat.cell - 0.5)));
    const auto last_col = std::min<std::int64_t>(
        lat.col_max,
        static_cast<std::int64_t>(std::floor((hi - lat.origin_x) / lat.cell - 0.5)));
    if (first_col > last_col) continue;
    total += count_row(row, first_col, last_col);
  }
  return total;
}

}  // namespace detail

// Area of the common intersection of `circles` on an unbounded all-true
// raster with cells of `resolution` meters anchored at the coordinate
// origin.
inline double intersection_area(std::span<const Circle> circles,
                                double resolution = 1.0) {
  if (circles.empty()) throw std::invalid_argument("intersection_area needs a circle");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  constexpr auto kLimit = std::numeric_limits<std::int64_t>::max() / 4;
  const detail::Lattice lat{0.0, 0.0, resolution, -kLimit, kLimit, -kLimit, kLimit};
  const auto cells = detail::count_cells(
      circles, lat, [](std::int64_t, std::int64_t first, std::int64_t last) {
        return static_cast<std::uint64_t>(last - first + 1);
      });
  return static_cast<double>(cells) * resolution * resolution;
}

// Area of the intersection of `circles` with the feasible cells of `grid`,
// at the grid's resolution.
inline double intersection_area(std::span<const Circle> circles, const MapGrid& grid) {
  if (circles.empty()) throw std::invalid_argument("intersection_area needs a circle");
  const detail::Lattice lat{grid.origin().x,
                            grid.origin().y,
                            grid.cell_size(),
                            0,
                            static_cast<std::int64_t>(grid.height()) - 1,
                            0,
                            static_cast<std::int64_t>(grid.width()) - 1};
  const auto cells = detail::count_cells(
      circles, lat, [&grid](std::int64_t row, std::int64_t first, std::int64_t last) {
        return static_cast<std::uint64_t>(grid.count_true(
            static_cast<std::size_t>(row), static_cast<std::size_t>(first),
            static_cast<std::size_t>(last)));
      });
  return static_cast<double>(cells) * grid.cell_area();
}

// Width-one-cell band along a circle's perimeter: the error budget used
// when comparing rasterized areas against analytic ones.
inline double rasterization_tolerance(const Circle& c, double cell_size) noexcept {
  return 2.0 * std::numbers::pi * c.radius * cell_size;
}

}  // namespace posshare
