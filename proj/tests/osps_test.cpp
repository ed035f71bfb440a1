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


#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "posshare/osps.hpp"

namespace posshare {
namespace {

double rel_err(const Point& a, const Point& b) {
  return distance(a, b) / std::max(1.0, std::hypot(b.x, b.y));
}

TEST(Osps, RadiusSchedule) {
  EXPECT_EQ(osps_radius(100, 5, 0), 100.0);
  EXPECT_EQ(osps_radius(100, 5, 2), 60.0);
  EXPECT_EQ(osps_radius(100, 5, 5), 0.0);
  EXPECT_EQ(osps_radius(7.3, 15, 15), 0.0);
}

TEST(Osps, FullFusionRecoversPosition) {
  Rng rng(11);
  for (std::size_t n : {1, 2, 4, 5, 15, 40}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Point pi{uniform_real(rng, -1e4, 1e4), uniform_real(rng, -1e4, 1e4)};
      const auto set = generate_osps(pi, n, 250.0, rng);
      ASSERT_EQ(set.n(), n);
      const auto c = fuse_osps(set, set.refinements);
      EXPECT_LE(rel_err(c.center, pi), 1e-9);
      EXPECT_EQ(c.radius, 0.0);
    }
  }
}

TEST(Osps, ContainmentChainAndShiftBound) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const Point pi{uniform_real(rng, -100.0, 100.0), uniform_real(rng, -100.0, 100.0)};
    const double r0 = uniform_real(rng, 1.0, 500.0);
    const auto set = generate_osps(pi, n, r0, rng);
    EXPECT_LE(distance(set.master.circle.center, pi), r0);
    EXPECT_EQ(set.master.circle.radius, r0);
    EXPECT_DOUBLE_EQ(set.delta_r, r0 / static_cast<double>(n));
    Point p = set.master.circle.center;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_LE(set.refinements[i].shift.norm(), set.delta_r * (1 + 1e-12));
      EXPECT_FALSE(set.refinements[i].radius.has_value());
      p = p + set.refinements[i].shift;
      // Allow for rounding of the final closing shift.
      EXPECT_LE(distance(p, pi), osps_radius(r0, n, i + 1) + 1e-9 * r0);
    }
  }
}

TEST(Osps, PrecisionDependsOnlyOnShareCount) {
  Rng rng(13);
  const std::size_t n = 5;
  const auto set = generate_osps({3, 4}, n, 50.0, rng);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<RefinementShare> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(set.refinements[i]);
    }
    const auto expected = fuse_osps(set, subset);
    EXPECT_EQ(expected.radius, 50.0 - 10.0 * static_cast<double>(subset.size()));
    std::vector<std::size_t> order(subset.size());
    std::iota(order.begin(), order.end(), 0);
    do {
      std::vector<RefinementShare> permuted;
      for (auto i : order) permuted.push_back(subset[i]);
      const auto c = fuse_osps(set, permuted);
      EXPECT_EQ(c, expected);
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(Osps, MasterCentersCoverAllQuadrants) {
  Rng rng(14);
  std::array<int, 4> quadrant{};
  const int samples = 10000;
  const Point pi{0, 0};
  for (int i = 0; i < samples; ++i) {
    const auto c = generate_osps(pi, 3, 10.0, rng).master.circle.center;
    ++quadrant[(c.x >= 0 ? 0 : 1) + (c.y >= 0 ? 0 : 2)];
  }
  double chi2 = 0;
  for (int q : quadrant) {
    const double e = samples / 4.0;
    chi2 += (q - e) * (q - e) / e;
  }
  // 3 degrees of freedom: chi-square 16.27 corresponds to p = 0.001.
  EXPECT_LT(chi2, 16.27);
}

// Plain per-step rejection: propose length U[0, dr] and a uniform angle
// until the position stays inside the next circle. Chains that reach a
// near-empty feasible set are abandoned (empty result); their expected
// cost is unbounded.
std::vector<Vector> naive_chain(Rng& rng, Point pi, std::size_t n, double r0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dr = r0 / static_cast<double>(n);
  Point p;
  do {
    p = {pi.x + r0 * (2 * unit(rng) - 1), pi.y + r0 * (2 * unit(rng) - 1)};
  } while (distance(p, pi) > r0);
  std::vector<Vector> out;
  for (std::size_t i = 1; i < n; ++i) {
    const double ri = r0 * static_cast<double>(n - i) / static_cast<double>(n);
    for (int draw = 0;; ++draw) {
      if (draw == 50000) return {};
      const double len = dr * unit(rng);
      const double a = 2 * std::numbers::pi * unit(rng);
      const Vector s{len * std::cos(a), len * std::sin(a)};
      if (distance(p + s, pi) <= ri) {
        out.push_back(s);
        p = p + s;
        break;
      }
    }
  }
  return out;
}

TEST(Osps, ShiftDistributionMatchesPlainRejection) {
  const std::size_t n = 4;
  const int samples = 10000;
  Rng a(18), b(19);
  // Mean and variance of each intermediate shift length, for both samplers.
  std::vector<double> sum_fast(n - 1), sq_fast(n - 1), sum_naive(n - 1), sq_naive(n - 1);
  int abandoned = 0;
  for (int t = 0; t < samples; ++t) {
    const auto set = generate_osps({0, 0}, n, 1.0, a);
    auto naive = naive_chain(b, {0, 0}, n, 1.0);
    while (naive.empty()) {
      ++abandoned;
      naive = naive_chain(b, {0, 0}, n, 1.0);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double f = set.refinements[i].shift.norm();
      const double g = naive[i].norm();
      sum_fast[i] += f;
      sq_fast[i] += f * f;
      sum_naive[i] += g;
      sq_naive[i] += g * g;
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mf = sum_fast[i] / samples, mn = sum_naive[i] / samples;
    const double vf = sq_fast[i] / samples - mf * mf, vn = sq_naive[i] / samples - mn * mn;
    const double se = std::sqrt((vf + vn) / samples);
    EXPECT_NEAR(mf, mn, 4 * se) << "share " << i;
  }
  // A few percent of plain chains stall; the rest must agree.
  EXPECT_LT(abandoned, samples / 10);
}

TEST(Osps, SameSeedSameShares) {
  Rng a(99), b(99);
  EXPECT_EQ(generate_osps({1, 2}, 7, 30.0, a), generate_osps({1, 2}, 7, 30.0, b));
}

TEST(Osps, SingleShareIsTheClosingShift) {
  Rng rng(15);
  const auto set = generate_osps({5, 5}, 1, 2.0, rng);
  ASSERT_EQ(set.n(), 1u);
  EXPECT_EQ(set.chain_end(), (Point{5, 5}));
}

TEST(Osps, RejectsBadArguments) {
  Rng rng(16);
  EXPECT_THROW(generate_osps({0, 0}, 0, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(generate_osps({0, 0}, 3, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(generate_osps({0, 0}, 3, -1.0, rng), std::invalid_argument);
  EXPECT_THROW(generate_osps({std::nan(""), 0}, 3, 1.0, rng), std::invalid_argument);
  const auto set = generate_osps({0, 0}, 2, 1.0, rng);
  std::vector<RefinementShare> three(3, set.refinements[0]);
  EXPECT_THROW(fuse_osps(set, three), std::invalid_argument);
}

TEST(Osps, NoSharesGivesMasterCircle) {
  Rng rng(17);
  const auto set = generate_osps({0, 0}, 4, 8.0, rng);
  EXPECT_EQ(fuse_osps(set, {}), set.master.circle);
}

}  // namespace
}  // namespace posshare
