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

// Attacker success probabilities.
//
// Servers are compromised independently, server i with probability risk_i.
// An attacker holding the shares of the compromised servers learns the
// position at the precision the precision model assigns to that many
// shares. The attack curve reports, for every number k of compromised
// servers, the probability of at least k compromises and the
// probability-weighted mean precision over all k-server subsets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "posshare/error.hpp"
#include "posshare/shares.hpp"

namespace posshare {

struct TrustRecord {
  std::string server_id;
  double risk = 0.0;  // probability of being compromised, in [0, 1]

  friend bool operator==(const TrustRecord&, const TrustRecord&) = default;
};

// "An attacker must not reach precision <= phi with probability >= p."
struct PrivacyLevel {
  double phi = 0.0;
  double p = 1.0;

  friend bool operator==(const PrivacyLevel&, const PrivacyLevel&) = default;
};

struct PrivacyRequirement {
  std::vector<PrivacyLevel> levels;

  // Probabilities in [0, 1], precisions finite and non-negative, and a
  // coarser precision threshold never tolerates a higher probability.
  void validate() const {
    for (const auto& level : levels) {
      detail::require(std::isfinite(level.phi) && level.phi >= 0.0,
                      "requirement precision must be finite and non-negative");
      detail::require(level.p >= 0.0 && level.p <= 1.0,
                      "requirement probability must lie in [0, 1]");
    }
    auto sorted = levels;
    std::sort(sorted.begin(), sorted.end(),
              [](const PrivacyLevel& a, const PrivacyLevel& b) { return a.phi < b.phi; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].phi > sorted[i - 1].phi && sorted[i].p > sorted[i - 1].p) {
        throw std::invalid_argument(
            "requirement probabilities must be non-increasing as precision thresholds grow");
      }
    }
  }
};

struct CurvePoint {
  std::size_t compromised = 0;  // k servers
  double phi = 0.0;             // weighted mean precision over k-subsets
  double p_exactly = 0.0;       // Pr[exactly k compromised]
  double p_at_least = 0.0;      // Pr[at least k compromised]
};

struct AttackCurve {
  double p_none = 1.0;               // Pr[no server compromised]
  std::vector<CurvePoint> points;    // k = 1 .. m

  // Pr[attacker precision <= phi].
  double probability_at(double phi) const noexcept {
    const double slack = 1e-9 * std::max(1.0, std::abs(phi));
    double total = 0.0;
    for (const auto& pt : points) {
      if (pt.phi <= phi + slack) total += pt.p_exactly;
    }
    return std::min(total, 1.0);
  }
};

// Precision (obfuscation radius) an attacker obtains from s shares, for
// s = 0 .. n. Homogeneous shares give r0 * (n - s) / n.
struct PrecisionModel {
  std::vector<double> by_count;

  static PrecisionModel homogeneous(std::size_t n, double r0) {
    detail::require(n >= 1, "precision model needs at least one share");
    PrecisionModel model;
    model.by_count.resize(n + 1);
    for (std::size_t s = 0; s <= n; ++s) {
      model.by_count[s] = r0 * static_cast<double>(n - s) / static_cast<double>(n);
    }
    return model;
  }

  // OSPS sets are homogeneous; CSPS sets use their generated radii.
  static PrecisionModel from_share_set(const ShareSet& set) {
    if (set.mode == Mode::osps) return homogeneous(set.n(), set.master.circle.radius);
    PrecisionModel model;
    model.by_count.push_back(set.master.circle.radius);
    for (const auto& s : set.refinements) model.by_count.push_back(s.radius.value_or(0.0));
    return model;
  }

  std::size_t shares() const noexcept { return by_count.empty() ? 0 : by_count.size() - 1; }

  // Precision gained by share j (0-based): by_count[j] - by_count[j + 1].
  std::vector<double> gains() const {
    std::vector<double> out;
    for (std::size_t j = 0; j + 1 < by_count.size(); ++j) {
      out.push_back(by_count[j] - by_count[j + 1]);
    }
    return out;
  }
};

inline constexpr std::size_t kMaxEnumeratedServers = 24;

namespace detail {

inline void validate_risks(std::span<const double> risks) {
  if (risks.empty()) throw std::invalid_argument("risk list is empty");
  for (double p : risks) {
    require(p >= 0.0 && p <= 1.0, "risk must lie in [0, 1]");
  }
}

}  // namespace detail

// Exact Pr[at least k of the servers are compromised], summed over every
// compromise subset of size >= k.
inline double prob_at_least_k(std::span<const double> risks, std::size_t k) {
  detail::validate_risks(risks);
  detail::require(k >= 1 && k <= risks.size(), "k must lie in [1, m]");
  detail::require(risks.size() <= kMaxEnumeratedServers,
                  "too many servers for subset enumeration");

  const std::size_t m = risks.size();
  double total = 0.0;
  auto visit = [&](auto&& self, std::size_t idx, std::size_t compromised,
                   double prob) -> void {
    if (compromised + (m - idx) < k || prob == 0.0) return;
    if (idx == m) {
      total += prob;
      return;
    }
    self(self, idx + 1, compromised + 1, prob * risks[idx]);
    self(self, idx + 1, compromised, prob * (1.0 - risks[idx]));
  };
  visit(visit, 0, 0, 1.0);
  return total;
}

// Attack curve for a placement given as the number of shares each server
// holds. Subsets are aggregated exactly by (servers compromised, shares
// obtained); a k with zero probability mass reports the unweighted mean
// precision over its subsets.
inline AttackCurve attack_curve(std::span<const double> risks,
                                std::span<const std::size_t> shares_per_server,
                                const PrecisionModel& model) {
  detail::validate_risks(risks);
  detail::require(risks.size() == shares_per_server.size(),
                  "one share count per server is required");
  detail::require(risks.size() <= kMaxEnumeratedServers,
                  "too many servers for the attack curve");
  const std::size_t n = model.shares();
  detail::require(n >= 1, "precision model is empty");
  detail::require(std::accumulate(shares_per_server.begin(), shares_per_server.end(),
                                  std::size_t{0}) == n,
                  "placement must cover every share of the precision model");

  const std::size_t m = risks.size();
  const std::size_t width = n + 1;
  // mass[k][s]: probability of exactly k compromised servers holding s shares.
  // subsets[k][s]: number of such subsets.
  std::vector<double> mass((m + 1) * width, 0.0);
  std::vector<double> subsets((m + 1) * width, 0.0);
  mass[0] = 1.0;
  subsets[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = risks[i];
    const std::size_t c = shares_per_server[i];
    for (std::size_t k = i + 1; k-- > 0;) {
      for (std::size_t s = n + 1; s-- > 0;) {
        const double here = mass[k * width + s];
        const double count = subsets[k * width + s];
        if (here == 0.0 && count == 0.0) continue;
        mass[(k + 1) * width + s + c] += here * p;
        subsets[(k + 1) * width + s + c] += count;
        mass[k * width + s] = here * (1.0 - p);
      }
    }
  }

  AttackCurve curve;
  curve.p_none = mass[0];
  curve.points.reserve(m);
  double tail = 0.0;
  std::vector<double> exactly(m + 1, 0.0);
  for (std::size_t k = 0; k <= m; ++k) {
    for (std::size_t s = 0; s <= n; ++s) exactly[k] += mass[k * width + s];
  }
  for (std::size_t k = m; k >= 1; --k) {
    tail += exactly[k];
    double weighted = 0.0;
    double weight = 0.0;
    double plain = 0.0;
    double plain_count = 0.0;
    for (std::size_t s = 0; s <= n; ++s) {
      weighted += mass[k * width + s] * model.by_count[s];
      weight += mass[k * width + s];
      plain += subsets[k * width + s] * model.by_count[s];
      plain_count += subsets[k * width + s];
    }
    const double phi = weight > 0.0 ? weighted / weight : plain / plain_count;
    curve.points.push_back({k, phi, exactly[k], std::min(tail, 1.0)});
  }
  std::reverse(curve.points.begin(), curve.points.end());
  return curve;
}

// True iff at every level the attacker reaches precision <= phi with
// probability strictly below p. A threshold of 1 constrains nothing.
inline bool satisfies(const AttackCurve& curve, const PrivacyRequirement& req) {
  for (const auto& level : req.levels) {
    if (level.p >= 1.0) continue;
    if (!(curve.probability_at(level.phi) < level.p)) return false;
  }
  return true;
}

}  // namespace posshare
