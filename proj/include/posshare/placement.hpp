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

// Trust-aware share placement.
//
// A placement assigns each of n refinement shares to one of m selected
// location servers. Its quality is the spread of risk-weighted precision
// loads: server i carries load risk_i * (sum of precision gains of the
// shares it stores), and the objective is max load - min load. Balanced
// loads put more precision on the more trusted servers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "posshare/error.hpp"
#include "posshare/privacy.hpp"
#include "posshare/random.hpp"

namespace posshare {

struct Placement {
  // assignment[j] = index into `servers` of the server holding share j.
  std::vector<std::size_t> assignment;
  // Selected servers, ascending by risk.
  std::vector<TrustRecord> servers;

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> out(servers.size(), 0);
    for (auto s : assignment) ++out.at(s);
    return out;
  }

  std::vector<double> risks() const {
    std::vector<double> out;
    out.reserve(servers.size());
    for (const auto& s : servers) out.push_back(s.risk);
    return out;
  }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct PlacementOutcome {
  Placement placement;
  std::size_t servers_used = 0;
  double objective = 0.0;
  bool satisfied = false;
  AttackCurve curve;
};

inline std::vector<TrustRecord> sorted_by_risk(std::vector<TrustRecord> servers) {
  for (const auto& s : servers) {
    detail::require(s.risk >= 0.0 && s.risk <= 1.0, "server risk must lie in [0, 1]");
  }
  std::stable_sort(servers.begin(), servers.end(),
                   [](const TrustRecord& a, const TrustRecord& b) { return a.risk < b.risk; });
  return servers;
}

inline AttackCurve attack_curve(const Placement& placement, const PrecisionModel& model) {
  const auto risks = placement.risks();
  const auto counts = placement.counts();
  return attack_curve(risks, counts, model);
}

// Round-robin: share j goes to server j mod m, so counts differ by at most one.
inline Placement uniform_placement(std::size_t n, std::vector<TrustRecord> servers) {
  detail::require(!servers.empty(), "uniform_placement needs at least one server");
  Placement out;
  out.servers = sorted_by_risk(std::move(servers));
  out.assignment.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.assignment[j] = j % out.servers.size();
  return out;
}

namespace detail {

struct Loads {
  double max = 0.0;
  double min = 0.0;
};

inline Loads weighted_loads(std::span<const std::size_t> assignment,
                            std::span<const double> risks, std::span<const double> gains,
                            std::vector<double>& scratch) {
  scratch.assign(risks.size(), 0.0);
  for (std::size_t j = 0; j < assignment.size(); ++j) scratch[assignment[j]] += gains[j];
  Loads out{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < risks.size(); ++i) {
    const double load = risks[i] * scratch[i];
    out.max = std::max(out.max, load);
    out.min = std::min(out.min, load);
  }
  return out;
}

}  // namespace detail

// max_i(risk_i * G_i) - min_i(risk_i * G_i), where G_i sums the precision
// gains of the shares on server i. `gains` holds one entry per share.
inline double objective(const Placement& placement, std::span<const double> gains) {
  detail::require(gains.size() == placement.assignment.size(),
                  "objective needs one precision gain per share");
  detail::require(!placement.servers.empty(), "placement has no servers");
  const auto risks = placement.risks();
  std::vector<double> scratch;
  const auto loads = detail::weighted_loads(placement.assignment, risks, gains, scratch);
  return loads.max - loads.min;
}

// Homogeneous shares: every share gains the same precision.
inline double objective(const Placement& placement, double gain_per_share) {
  const std::vector<double> gains(placement.assignment.size(), gain_per_share);
  return objective(placement, gains);
}

struct GeneticOptions {
  std::size_t population = 10;
  std::size_t offspring = 40;
  std::size_t generations = 200;
  // Stop as soon as the best placement satisfies the requirement.
  bool stop_when_satisfied = true;
  // Reassign whole share groups so that safer servers carry the larger
  // precision totals; never increases the objective.
  bool order_by_risk = true;
};

namespace detail {

struct Candidate {
  std::vector<std::size_t> assignment;
  double objective = 0.0;
  double max_load = 0.0;
};

// Lower objective first, then lower maximum load, then lexicographic.
inline bool fitter(const Candidate& a, const Candidate& b) {
  return std::tie(a.objective, a.max_load, a.assignment) <
         std::tie(b.objective, b.max_load, b.assignment);
}

inline void score(Candidate& c, std::span<const double> risks, std::span<const double> gains,
                  std::vector<double>& scratch) {
  const auto loads = weighted_loads(c.assignment, risks, gains, scratch);
  c.objective = loads.max - loads.min;
  c.max_load = loads.max;
}

// Moves each server's share group to the server whose risk rank matches
// the group's precision-total rank (largest total to the safest server).
inline std::vector<std::size_t> order_groups_by_risk(std::span<const std::size_t> assignment,
                                                     std::size_t m,
                                                     std::span<const double> gains) {
  std::vector<double> totals(m, 0.0);
  for (std::size_t j = 0; j < assignment.size(); ++j) totals[assignment[j]] += gains[j];
  std::vector<std::size_t> groups(m);
  std::iota(groups.begin(), groups.end(), 0);
  std::stable_sort(groups.begin(), groups.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
  // Servers are stored ascending by risk, so rank r is server r.
  std::vector<std::size_t> target(m);
  for (std::size_t rank = 0; rank < m; ++rank) target[groups[rank]] = rank;
  std::vector<std::size_t> out(assignment.begin(), assignment.end());
  for (auto& s : out) s = target[s];
  return out;
}

}  // namespace detail

// Genetic search for a low-objective placement on a fixed server set.
// The initial population holds the uniform placement plus random ones;
// each generation breeds `offspring` children (uniform crossover of two
// random parents with probability 1/2, then one random reassignment),
// keeps the fittest `population` of them, and stops early once the best
// placement's attack curve satisfies `req`. Returns the best placement
// seen in any generation.
template <std::uniform_random_bit_generator G>
Placement place_optimized(std::size_t n, std::vector<TrustRecord> servers,
                          const PrivacyRequirement& req, const PrecisionModel& model,
                          G& rng, const GeneticOptions& opts = {}) {
  detail::require(!servers.empty(), "place_optimized needs at least one server");
  detail::require(model.shares() == n, "precision model must describe n shares");
  detail::require(opts.population >= 1 && opts.offspring >= opts.population,
                  "offspring must be at least the population size");

  Placement result;
  result.servers = sorted_by_risk(std::move(servers));
  const std::size_t m = result.servers.size();
  const auto risks = result.risks();
  const auto gains = model.gains();
  std::vector<double> scratch;

  auto satisfied = [&](const std::vector<std::size_t>& assignment) {
    std::vector<std::size_t> counts(m, 0);
    for (auto s : assignment) ++counts[s];
    return satisfies(attack_curve(risks, counts, model), req);
  };

  std::vector<detail::Candidate> population;
  population.reserve(opts.population);
  {
    detail::Candidate uniform;
    uniform.assignment = uniform_placement(n, result.servers).assignment;
    detail::score(uniform, risks, gains, scratch);
    population.push_back(std::move(uniform));
  }
  while (population.size() < opts.population) {
    detail::Candidate c;
    c.assignment.resize(n);
    for (auto& gene : c.assignment) gene = uniform_index(rng, m);
    detail::score(c, risks, gains, scratch);
    population.push_back(std::move(c));
  }
  std::sort(population.begin(), population.end(), detail::fitter);
  detail::Candidate best = population.front();

  std::vector<detail::Candidate> children(opts.offspring);
  for (std::size_t generation = 0; generation < opts.generations && n > 0; ++generation) {
    if (opts.stop_when_satisfied && satisfied(best.assignment)) break;

    for (auto& child : children) {
      const auto& a = population[uniform_index(rng, population.size())];
      const auto& b = population[uniform_index(rng, population.size())];
      child.assignment = a.assignment;
      if (coin_flip(rng)) {
        for (std::size_t j = 0; j < n; ++j) {
          if (coin_flip(rng)) child.assignment[j] = b.assignment[j];
        }
      }
      child.assignment[uniform_index(rng, n)] = uniform_index(rng, m);
    }
    // Children are scored independently; the sort below fixes the order.
    for (auto& child : children) detail::score(child, risks, gains, scratch);
    std::sort(children.begin(), children.end(), detail::fitter);
    population.assign(children.begin(),
                      children.begin() + static_cast<std::ptrdiff_t>(opts.population));
    if (detail::fitter(population.front(), best)) best = population.front();
  }

  if (opts.order_by_risk && n > 0) {
    detail::Candidate ordered;
    ordered.assignment = detail::order_groups_by_risk(best.assignment, m, gains);
    detail::score(ordered, risks, gains, scratch);
    if (ordered.objective <= best.objective) best = std::move(ordered);
  }
  result.assignment = std::move(best.assignment);
  return result;
}

inline constexpr double kMaxExhaustivePlacements = 1e7;

// Globally objective-minimal placement by enumerating all m^n assignments
// in lexicographic order; the first minimum wins ties.
inline Placement place_exhaustive(std::size_t n, std::vector<TrustRecord> servers,
                                  std::span<const double> gains) {
  detail::require(!servers.empty(), "place_exhaustive needs at least one server");
  detail::require(gains.size() == n, "place_exhaustive needs one gain per share");
  const std::size_t m = servers.size();
  if (std::pow(static_cast<double>(m), static_cast<double>(n)) > kMaxExhaustivePlacements) {
    throw InfeasibleError("instance too large for exhaustive placement");
  }

  Placement out;
  out.servers = sorted_by_risk(std::move(servers));
  const auto risks = out.risks();
  std::vector<double> scratch;

  std::vector<std::size_t> current(n, 0);
  std::vector<std::size_t> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (;;) {
    const auto loads = detail::weighted_loads(current, risks, gains, scratch);
    const double value = loads.max - loads.min;
    if (best.empty() || value < best_value - 1e-12 * std::max(1.0, std::abs(best_value))) {
      best_value = value;
      best = current;
    }
    // Odometer increment, last share fastest.
    bool wrapped = true;
    for (std::size_t pos = n; pos-- > 0;) {
      if (++current[pos] < m) {
        wrapped = false;
        break;
      }
      current[pos] = 0;
    }
    if (wrapped) break;
  }
  out.assignment = std::move(best);
  return out;
}

inline Placement place_exhaustive(std::size_t n, std::vector<TrustRecord> servers) {
  const std::vector<double> gains(n, 1.0);
  return place_exhaustive(n, std::move(servers), gains);
}

namespace detail {

inline PlacementOutcome make_outcome(Placement placement, const PrivacyRequirement& req,
                                     const PrecisionModel& model) {
  PlacementOutcome out;
  out.servers_used = placement.servers.size();
  const auto gains = model.gains();
  out.objective = objective(placement, gains);
  out.curve = attack_curve(placement, model);
  out.satisfied = satisfies(out.curve, req);
  out.placement = std::move(placement);
  return out;
}

}  // namespace detail

// Selects the fewest most-trusted servers that can meet `req`. For
// m = m_min .. m0 it tries the uniform placement on the m safest servers,
// then the genetic optimizer, and returns the first satisfying outcome.
// When even m0 servers do not suffice, the lower-objective of the two m0
// outcomes is returned with satisfied = false.
template <std::uniform_random_bit_generator G>
PlacementOutcome select_and_place(const PrivacyRequirement& req, std::size_t n,
                                  std::vector<TrustRecord> candidates, std::size_t m_min,
                                  const PrecisionModel& model, G& rng,
                                  const GeneticOptions& opts = {}) {
  req.validate();
  detail::require(m_min >= 1 && m_min <= candidates.size(),
                  "m_min must lie in [1, number of candidate servers]");
  detail::require(model.shares() == n, "precision model must describe n shares");
  if (n < m_min) {
    throw InfeasibleError("fewer shares than the minimum number of servers");
  }
  const auto sorted = sorted_by_risk(std::move(candidates));
  const std::size_t m0 = sorted.size();

  PlacementOutcome fallback;
  for (std::size_t m = m_min; m <= m0; ++m) {
    std::vector<TrustRecord> selected(sorted.begin(),
                                      sorted.begin() + static_cast<std::ptrdiff_t>(m));
    auto uniform = detail::make_outcome(uniform_placement(n, selected), req, model);
    if (uniform.satisfied) return uniform;

    auto optimized = detail::make_outcome(
        place_optimized(n, std::move(selected), req, model, rng, opts), req, model);
    if (optimized.satisfied) return optimized;

    fallback = optimized.objective <= uniform.objective ? std::move(optimized)
                                                        : std::move(uniform);
  }
  return fallback;
}

}  // namespace posshare
