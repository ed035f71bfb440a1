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
#include <numbers>

namespace posshare {

// All coordinates are planar meters on a local projection.

struct Vector {
  double dx = 0.0;
  double dy = 0.0;

  double norm() const noexcept { return std::hypot(dx, dy); }

  Vector& operator+=(const Vector& o) noexcept {
    dx += o.dx;
    dy += o.dy;
    return *this;
  }
  friend Vector operator+(Vector a, const Vector& b) noexcept { return a += b; }
  friend Vector operator-(const Vector& a, const Vector& b) noexcept {
    return {a.dx - b.dx, a.dy - b.dy};
  }
  friend Vector operator*(double s, const Vector& v) noexcept {
    return {s * v.dx, s * v.dy};
  }
  friend bool operator==(const Vector&, const Vector&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }

  friend Point operator+(const Point& p, const Vector& v) noexcept {
    return {p.x + v.dx, p.y + v.dy};
  }
  friend Point operator-(const Point& p, const Vector& v) noexcept {
    return {p.x - v.dx, p.y - v.dy};
  }
  friend Vector operator-(const Point& a, const Point& b) noexcept {
    return {a.x - b.x, a.y - b.y};
  }
  friend bool operator==(const Point&, const Point&) = default;
};

struct Circle {
  Point center;
  double radius = 0.0;

  friend bool operator==(const Circle&, const Circle&) = default;
};

inline double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double circle_area(const Circle& c) noexcept {
  return std::numbers::pi * c.radius * c.radius;
}

// Boundary inclusive. Compared on squared lengths so that exact
// Pythagorean cases stay exact.
inline bool contains(const Circle& c, const Point& p) noexcept {
  const double dx = p.x - c.center.x;
  const double dy = p.y - c.center.y;
  return dx * dx + dy * dy <= c.radius * c.radius;
}

}  // namespace posshare
