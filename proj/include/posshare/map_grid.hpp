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
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "posshare/error.hpp"
#include "posshare/geometry.hpp"

namespace posshare {

// Binary raster of the places a user can possibly be. Cell (col, row)
// covers [origin.x + col*cell, origin.x + (col+1)*cell) horizontally and
// likewise vertically, with row 0 at the bottom. Everything outside the
// raster is infeasible.
class MapGrid {
 public:
  MapGrid(Point origin, double cell_size, std::size_t width, std::size_t height,
          std::vector<std::uint8_t> cells)
      : origin_(origin),
        cell_size_(cell_size),
        width_(width),
        height_(height),
        cells_(std::move(cells)) {
    detail::require(origin.finite(), "map origin must be finite");
    detail::require(std::isfinite(cell_size) && cell_size > 0.0,
                    "map cell size must be positive");
    detail::require(width > 0 && height > 0, "map must have at least one cell");
    detail::require(cells_.size() == width * height,
                    "map cell count must equal width*height");
    for (auto& c : cells_) c = c ? 1 : 0;
    rebuild_prefix();
  }

  static MapGrid filled(Point origin, double cell_size, std::size_t width,
                        std::size_t height, bool value) {
    return MapGrid(origin, cell_size, width, height,
                   std::vector<std::uint8_t>(width * height, value ? 1 : 0));
  }

  // Builds a grid by evaluating `feasible` at every cell center.
  template <class Predicate>
  static MapGrid from_predicate(Point origin, double cell_size,
                                std::size_t width, std::size_t height,
                                Predicate&& feasible) {
    std::vector<std::uint8_t> cells(width * height);
    for (std::size_t row = 0; row < height; ++row) {
      for (std::size_t col = 0; col < width; ++col) {
        const Point center{origin.x + (static_cast<double>(col) + 0.5) * cell_size,
                           origin.y + (static_cast<double>(row) + 0.5) * cell_size};
        cells[row * width + col] = feasible(center) ? 1 : 0;
      }
    }
    return MapGrid(origin, cell_size, width, height, std::move(cells));
  }

  const Point& origin() const noexcept { return origin_; }
  double cell_size() const noexcept { return cell_size_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  double cell_area() const noexcept { return cell_size_ * cell_size_; }

  bool at(std::size_t col, std::size_t row) const {
    return cells_.at(row * width_ + col) != 0;
  }

  void set(std::size_t col, std::size_t row, bool value) {
    cells_.at(row * width_ + col) = value ? 1 : 0;
    rebuild_prefix_row(row);
  }

  Point cell_center(std::size_t col, std::size_t row) const noexcept {
    return {origin_.x + (static_cast<double>(col) + 0.5) * cell_size_,
            origin_.y + (static_cast<double>(row) + 0.5) * cell_size_};
  }

  // Cell containing `p`, or nothing when `p` is off the raster.
  std::optional<std::pair<std::size_t, std::size_t>> cell_of(const Point& p) const {
    const double fx = std::floor((p.x - origin_.x) / cell_size_);
    const double fy = std::floor((p.y - origin_.y) / cell_size_);
    if (fx < 0 || fy < 0 || fx >= static_cast<double>(width_) ||
        fy >= static_cast<double>(height_)) {
      return std::nullopt;
    }
    return std::pair{static_cast<std::size_t>(fx), static_cast<std::size_t>(fy)};
  }

  bool feasible(const Point& p) const {
    const auto cell = cell_of(p);
    return cell && at(cell->first, cell->second);
  }

  // Number of true cells in columns [first, last] of `row`.
  std::size_t count_true(std::size_t row, std::size_t first, std::size_t last) const {
    const std::size_t base = row * (width_ + 1);
    return prefix_[base + last + 1] - prefix_[base + first];
  }

  std::size_t true_cells() const noexcept {
    std::size_t total = 0;
    for (std::size_t row = 0; row < height_; ++row) {
      total += prefix_[row * (width_ + 1) + width_];
    }
    return total;
  }

  double true_area() const noexcept {
    return static_cast<double>(true_cells()) * cell_area();
  }

  // Axis-aligned extent of the raster.
  Point min_corner() const noexcept { return origin_; }
  Point max_corner() const noexcept {
    return {origin_.x + static_cast<double>(width_) * cell_size_,
            origin_.y + static_cast<double>(height_) * cell_size_};
  }

  friend bool operator==(const MapGrid& a, const MapGrid& b) {
    return a.origin_ == b.origin_ && a.cell_size_ == b.cell_size_ &&
           a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  void rebuild_prefix() {
    prefix_.assign(height_ * (width_ + 1), 0);
    for (std::size_t row = 0; row < height_; ++row) rebuild_prefix_row(row);
  }

  void rebuild_prefix_row(std::size_t row) {
    const std::size_t base = row * (width_ + 1);
    prefix_[base] = 0;
    for (std::size_t col = 0; col < width_; ++col) {
      prefix_[base + col + 1] = prefix_[base + col] + cells_[row * width_ + col];
    }
  }

  Point origin_;
  double cell_size_;
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> prefix_;
};

// Text format, PGM-like:
//
//   MAPGRID
//   <width> <height>
//   <origin_x> <origin_y>
//   <cell_size>
//   <height rows of width 0/1 digits, top row first>
//
// Digits within a row may be separated by whitespace. Lines starting with
// '#' are comments.
inline MapGrid read_map_grid(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::optional<std::string> {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return line;
    }
    return std::nullopt;
  };

  auto magic = next_line();
  if (!magic) throw ParseError("empty map file");
  {
    std::istringstream ss(*magic);
    std::string word;
    ss >> word;
    if (word != "MAPGRID") throw ParseError("expected MAPGRID header", line_no);
  }

  std::size_t width = 0, height = 0;
  double ox = 0, oy = 0, cell = 0;
  auto dims = next_line();
  if (!dims || !(std::istringstream(*dims) >> width >> height) || width == 0 ||
      height == 0) {
    throw ParseError("expected '<width> <height>'", line_no);
  }
  auto origin = next_line();
  if (!origin || !(std::istringstream(*origin) >> ox >> oy) || !std::isfinite(ox) ||
      !std::isfinite(oy)) {
    throw ParseError("expected '<origin_x> <origin_y>'", line_no);
  }
  auto size = next_line();
  if (!size || !(std::istringstream(*size) >> cell) || !(cell > 0.0) ||
      !std::isfinite(cell)) {
    throw ParseError("expected positive '<cell_size>'", line_no);
  }

  std::vector<std::uint8_t> cells(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    auto row_text = next_line();
    if (!row_text) throw ParseError("missing map rows", line_no);
    const std::size_t row = height - 1 - r;
    std::size_t col = 0;
    for (char ch : *row_text) {
      if (ch == ' ' || ch == '\t' || ch == '\r') continue;
      if (ch != '0' && ch != '1') throw ParseError("map cells must be 0 or 1", line_no);
      if (col >= width) throw ParseError("too many cells in map row", line_no);
      cells[row * width + col++] = ch == '1' ? 1 : 0;
    }
    if (col != width) throw ParseError("too few cells in map row", line_no);
  }
  return MapGrid({ox, oy}, cell, width, height, std::move(cells));
}

inline void write_map_grid(std::ostream& out, const MapGrid& grid) {
  out << "MAPGRID\n" << grid.width() << ' ' << grid.height() << '\n';
  out.precision(17);
  out << grid.origin().x << ' ' << grid.origin().y << '\n' << grid.cell_size() << '\n';
  for (std::size_t r = 0; r < grid.height(); ++r) {
    const std::size_t row = grid.height() - 1 - r;
    for (std::size_t col = 0; col < grid.width(); ++col) {
      out << (grid.at(col, row) ? '1' : '0');
    }
    out << '\n';
  }
}

}  // namespace posshare
