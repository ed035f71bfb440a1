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

// Deterministic replay harness: a mobile object, in-memory location
// servers and querying applications. "Network" traffic is a synchronous
// call that bumps per-server message counters.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "posshare/csps.hpp"
#include "posshare/error.hpp"
#include "posshare/osps.hpp"
#include "posshare/placement.hpp"
#include "posshare/privacy.hpp"
#include "posshare/random.hpp"
#include "posshare/shares.hpp"
#include "posshare/trajectory.hpp"
#include "posshare/update.hpp"

namespace posshare {

struct LocationServer {
  std::string id;
  double risk = 0.0;
  std::optional<MasterShare> master;
  std::map<std::size_t, RefinementShare> refinements;  // by share index
  std::size_t messages_received = 0;
};

class Cluster {
 public:
  explicit Cluster(std::vector<TrustRecord> servers) {
    detail::require(!servers.empty(), "cluster needs at least one server");
    for (auto& s : servers) servers_.push_back({std::move(s.server_id), s.risk, {}, {}, 0});
  }

  // n equally trusted servers "ls-1" .. "ls-n".
  static Cluster uniform(std::size_t n, double risk = 0.0) {
    std::vector<TrustRecord> records;
    for (std::size_t i = 1; i <= n; ++i) records.push_back({"ls-" + std::to_string(i), risk});
    return Cluster(std::move(records));
  }

  // Full (re)distribution: every server receives the master plus the
  // shares assigned to it, one message per server. Without an assignment,
  // share j goes to server j mod m.
  std::size_t publish_all(const ShareSet& set,
                          std::span<const std::size_t> assignment = {}) {
    detail::require(assignment.empty() || assignment.size() == set.n(),
                    "assignment must cover every share");
    mode_ = set.mode;
    n_ = set.n();
    for (auto& s : servers_) {
      s.master = set.master;
      s.refinements.clear();
    }
    for (std::size_t j = 0; j < set.n(); ++j) {
      const std::size_t target = assignment.empty() ? j % servers_.size() : assignment[j];
      servers_.at(target).refinements[j] = set.refinements[j];
    }
    for (auto& s : servers_) ++s.messages_received;
    return servers_.size();
  }

  // Master-only update: a single message, replicated server side.
  std::size_t publish_master(const MasterShare& master) {
    for (auto& s : servers_) s.master = master;
    ++servers_.front().messages_received;
    return 1;
  }

  const std::vector<LocationServer>& servers() const noexcept { return servers_; }
  Mode mode() const noexcept { return mode_; }
  std::size_t shares() const noexcept { return n_; }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      if (servers_[i].id == id) return i;
    }
    throw std::invalid_argument("unknown server id: " + id);
  }

 private:
  std::vector<LocationServer> servers_;
  Mode mode_ = Mode::osps;
  std::size_t n_ = 0;
};

struct LbaResult {
  Circle circle;                        // fused circle (last circle in CSPS)
  std::optional<ObfuscationArea> area;  // CSPS only
  std::size_t shares_used = 0;
};

// Fuses everything the accessible servers hold. CSPS chains are walked in
// share-index order and need the map.
inline LbaResult lba_query(const Cluster& cluster, std::span<const std::size_t> accessible,
                           const MapGrid* grid = nullptr) {
  if (accessible.empty()) throw std::invalid_argument("lba_query: no accessible server");
  std::optional<MasterShare> master;
  std::map<std::size_t, RefinementShare> shares;
  for (auto idx : accessible) {
    const auto& server = cluster.servers().at(idx);
    if (server.master) master = server.master;
    shares.insert(server.refinements.begin(), server.refinements.end());
  }
  if (!master) throw Error("lba_query: master share unavailable");

  std::vector<RefinementShare> ordered;
  ordered.reserve(shares.size());
  for (const auto& [index, share] : shares) ordered.push_back(share);

  LbaResult out;
  out.shares_used = ordered.size();
  if (cluster.mode() == Mode::osps) {
    out.circle = fuse_osps(cluster.shares(), *master, ordered);
  } else {
    if (grid == nullptr) throw std::invalid_argument("lba_query: CSPS fusion needs the map");
    out.area = fuse_csps(*grid, cluster.shares(), master->circle, ordered);
    out.circle = out.area->circles.back();
  }
  return out;
}

// Replays a trajectory through the update protocol. The first fix is a
// basic update (initial distribution); every later fix is optimized,
// basic or, with suppression enabled, dropped.
template <std::uniform_random_bit_generator G>
MessageLedger run_update_experiment(const Trajectory& traj, std::size_t n, double r0,
                                    MessageCosts costs, G& rng,
                                    SuppressionPolicy suppression = {}) {
  detail::require(n >= 1, "run_update_experiment: n must be at least 1");
  detail::require(!traj.fixes.empty(), "run_update_experiment: empty trajectory");
  MessageLedger ledger(n, costs);
  auto cluster = Cluster::uniform(n);

  ShareSet current = generate_osps(traj.fixes.front().position, n, r0, rng);
  cluster.publish_all(current);
  ledger.record(UpdateKind::basic);
  Fix last_sent = traj.fixes.front();

  for (std::size_t i = 1; i < traj.fixes.size(); ++i) {
    const Fix& fix = traj.fixes[i];
    if (suppression.suppress(fix.t - last_sent.t, distance(fix.position, last_sent.position))) {
      ledger.record(UpdateKind::suppressed);
      continue;
    }
    const auto decision = update_shares(last_sent.position, fix.position, current, rng);
    current = apply_update(current, decision);
    if (decision.kind == UpdateKind::optimized) {
      cluster.publish_master(current.master);
    } else {
      cluster.publish_all(current);
    }
    ledger.record(decision.kind);
    last_sent = fix;
  }
  return ledger;
}

struct SweepRow {
  double r0 = 0.0;
  std::size_t updates = 0;
  std::size_t optimized = 0;
  std::size_t total = 0;
  std::size_t baseline = 0;
  double saving_ratio = 0.0;
};

// One update experiment per radius, each from a fresh generator seeded
// with `seed`, so rows are independent of sweep order.
inline std::vector<SweepRow> run_r0_sweep(const Trajectory& traj, std::size_t n,
                                          std::span<const double> radii, MessageCosts costs,
                                          std::uint64_t seed) {
  std::vector<SweepRow> rows;
  for (double r0 : radii) {
    Rng rng(seed);
    const auto ledger = run_update_experiment(traj, n, r0, costs, rng);
    rows.push_back({r0, ledger.entries().size(), ledger.count(UpdateKind::optimized),
                    ledger.total(), ledger.baseline_total(), ledger.reduction_ratio()});
  }
  return rows;
}

struct ComparisonRow {
  double phi = 0.0;
  double p_uniform = 0.0;
  double p_optimized = 0.0;
  double delta = 0.0;  // p_uniform - p_optimized
};

struct PlacementComparison {
  Placement uniform;
  Placement optimized;
  double uniform_objective = 0.0;
  double optimized_objective = 0.0;
  AttackCurve uniform_curve;
  AttackCurve optimized_curve;
  // Pr[precision <= phi] for both curves at every phi either curve has.
  std::vector<ComparisonRow> rows;
  // Row at the uniform curve's most probable compromise count.
  ComparisonRow dominant_peak;
};

// Uniform versus genetic placement on all given servers.
template <std::uniform_random_bit_generator G>
PlacementComparison run_placement_experiment(std::vector<TrustRecord> servers, std::size_t n,
                                             const PrivacyRequirement& req,
                                             const PrecisionModel& model, G& rng,
                                             const GeneticOptions& opts = {}) {
  req.validate();
  PlacementComparison out;
  const auto gains = model.gains();
  out.uniform = uniform_placement(n, servers);
  out.optimized = place_optimized(n, std::move(servers), req, model, rng, opts);
  out.uniform_objective = objective(out.uniform, gains);
  out.optimized_objective = objective(out.optimized, gains);
  out.uniform_curve = attack_curve(out.uniform, model);
  out.optimized_curve = attack_curve(out.optimized, model);

  std::vector<double> phis;
  for (const auto& pt : out.uniform_curve.points) phis.push_back(pt.phi);
  for (const auto& pt : out.optimized_curve.points) phis.push_back(pt.phi);
  std::sort(phis.begin(), phis.end());
  phis.erase(std::unique(phis.begin(), phis.end()), phis.end());
  auto row_at = [&](double phi) {
    ComparisonRow row;
    row.phi = phi;
    row.p_uniform = out.uniform_curve.probability_at(phi);
    row.p_optimized = out.optimized_curve.probability_at(phi);
    row.delta = row.p_uniform - row.p_optimized;
    return row;
  };
  for (double phi : phis) out.rows.push_back(row_at(phi));

  const auto& pts = out.uniform_curve.points;
  const auto peak = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.p_exactly < b.p_exactly;
  });
  out.dominant_peak = row_at(peak->phi);
  return out;
}

struct AttackSample {
  // Per compromised-server count k = 0..m.
  std::vector<std::size_t> hits;
  std::vector<double> mean_phi;
  std::size_t trials = 0;
};

// Monte Carlo counterpart of attack_curve: draws independent compromise
// events per server and records the precision each draw reveals.
template <std::uniform_random_bit_generator G>
AttackSample sample_attacks(const Placement& placement, const PrecisionModel& model,
                            std::size_t trials, G& rng) {
  const auto counts = placement.counts();
  const std::size_t m = counts.size();
  AttackSample out;
  out.hits.assign(m + 1, 0);
  out.mean_phi.assign(m + 1, 0.0);
  out.trials = trials;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t k = 0;
    std::size_t shares = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (unit(rng) < placement.servers[i].risk) {
        ++k;
        shares += counts[i];
      }
    }
    ++out.hits[k];
    out.mean_phi[k] += model.by_count[shares];
  }
  for (std::size_t k = 0; k <= m; ++k) {
    if (out.hits[k] > 0) out.mean_phi[k] /= static_cast<double>(out.hits[k]);
  }
  return out;
}

}  // namespace posshare
