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

// Message-minimizing position updates.
//
// Refinement shares are relative shifts; only the master share carries
// absolute coordinates. When the user moves far enough that the new master
// circle cannot intersect the old one, re-anchoring the existing chain with
// a new master is enough: one message instead of n.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "posshare/error.hpp"
#include "posshare/geometry.hpp"
#include "posshare/osps.hpp"
#include "posshare/random.hpp"
#include "posshare/shares.hpp"

namespace posshare {

enum class UpdateKind { optimized, basic, suppressed };

inline constexpr std::string_view to_string(UpdateKind kind) noexcept {
  switch (kind) {
    case UpdateKind::optimized: return "optimized";
    case UpdateKind::basic: return "basic";
    case UpdateKind::suppressed: return "suppressed";
  }
  return "unknown";
}

struct UpdateDecision {
  UpdateKind kind = UpdateKind::basic;
  std::size_t messages_mo_ls = 0;
  MasterShare new_master;
  // Present only for basic updates.
  std::optional<std::vector<RefinementShare>> new_refinements;
};

// Consecutive master circles of radius r0 are disjoint. Tangent circles
// intersect, so the comparison is strict.
inline bool decide_update(const MasterShare& prev_master, const Point& new_master_center,
                          double r0) noexcept {
  return distance(prev_master.circle.center, new_master_center) > 2.0 * r0;
}

// Decides how to move an OSPS share set from pi_prev to pi_next. The only
// master placement that keeps the old chain valid is p = pi_next - sum of
// shifts; if that circle is disjoint from the previous master and contains
// pi_next, only the master is resent. Otherwise all shares are regenerated.
template <std::uniform_random_bit_generator G>
UpdateDecision update_shares(const Point& pi_prev, const Point& pi_next,
                             const ShareSet& set_prev, G& rng) {
  (void)pi_prev;
  detail::require(set_prev.mode == Mode::osps, "update_shares supports OSPS share sets");
  detail::require(set_prev.n() >= 1, "share set is empty");
  detail::require(pi_next.finite(), "update_shares: position must be finite");

  const double r0 = set_prev.master.circle.radius;
  const Point candidate = pi_next - sum_of_shifts(set_prev.refinements);
  const MasterShare moved{Circle{candidate, r0}};

  UpdateDecision out;
  if (decide_update(set_prev.master, candidate, r0) && contains(moved.circle, pi_next)) {
    out.kind = UpdateKind::optimized;
    out.messages_mo_ls = 1;
    out.new_master = moved;
    return out;
  }
  auto fresh = generate_osps(pi_next, set_prev.n(), r0, rng);
  out.kind = UpdateKind::basic;
  out.messages_mo_ls = fresh.n();
  out.new_master = fresh.master;
  out.new_refinements = std::move(fresh.refinements);
  return out;
}

// Share set after applying a decision to `prev`.
inline ShareSet apply_update(const ShareSet& prev, const UpdateDecision& decision) {
  ShareSet next = prev;
  if (decision.kind == UpdateKind::suppressed) return next;
  next.master = decision.new_master;
  if (decision.new_refinements) next.refinements = *decision.new_refinements;
  return next;
}

// MO->LS reduction of one optimized update against a basic one: (n-1)/n.
inline double reduction_rate(std::size_t n) {
  detail::require(n >= 1, "reduction_rate: n must be at least 1");
  return static_cast<double>(n - 1) / static_cast<double>(n);
}

// Total messages charged per update, MO->LS and LS->LBA together. The
// defaults are the per-update totals observed for n = 5.
struct MessageCosts {
  std::size_t basic = 20;
  std::size_t optimized = 6;
};

// Maximum-velocity countermeasure: an update is dropped when less time has
// passed than twice the travel time at `max_speed` between the last sent
// position and the new one. Off by default.
struct SuppressionPolicy {
  bool enabled = false;
  double max_speed = 0.0;  // meters per second

  bool suppress(double elapsed_seconds, double distance_meters) const noexcept {
    if (!enabled || !(max_speed > 0.0)) return false;
    return elapsed_seconds < 2.0 * distance_meters / max_speed;
  }
};

struct LedgerEntry {
  std::size_t update_index = 0;
  UpdateKind kind = UpdateKind::basic;
  std::size_t mo_ls = 0;
  std::size_t ls_lba = 0;

  std::size_t total() const noexcept { return mo_ls + ls_lba; }
};

// Per-update message accounting against an all-basic baseline.
class MessageLedger {
 public:
  MessageLedger(std::size_t n, MessageCosts costs) : n_(n), costs_(costs) {
    detail::require(n >= 1, "ledger: n must be at least 1");
    if (costs.basic < n || costs.optimized < 1) {
      throw std::invalid_argument("message costs must cover the MO->LS messages");
    }
  }

  void record(UpdateKind kind) {
    LedgerEntry e;
    e.update_index = entries_.size();
    e.kind = kind;
    switch (kind) {
      case UpdateKind::basic:
        e.mo_ls = n_;
        e.ls_lba = costs_.basic - n_;
        break;
      case UpdateKind::optimized:
        e.mo_ls = 1;
        e.ls_lba = costs_.optimized - 1;
        break;
      case UpdateKind::suppressed:
        break;
    }
    entries_.push_back(e);
  }

  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  std::size_t n() const noexcept { return n_; }
  const MessageCosts& costs() const noexcept { return costs_; }

  std::size_t count(UpdateKind kind) const noexcept {
    std::size_t c = 0;
    for (const auto& e : entries_) c += e.kind == kind;
    return c;
  }

  std::size_t total() const noexcept {
    std::size_t t = 0;
    for (const auto& e : entries_) t += e.total();
    return t;
  }
  std::size_t baseline_total() const noexcept { return entries_.size() * costs_.basic; }

  std::size_t mo_ls_total() const noexcept {
    std::size_t t = 0;
    for (const auto& e : entries_) t += e.mo_ls;
    return t;
  }
  std::size_t mo_ls_baseline() const noexcept { return entries_.size() * n_; }

  // 1 - total / baseline; 0 for an empty ledger.
  double reduction_ratio() const noexcept {
    const auto base = baseline_total();
    return base == 0 ? 0.0
                     : 1.0 - static_cast<double>(total()) / static_cast<double>(base);
  }
  double mo_ls_reduction_ratio() const noexcept {
    const auto base = mo_ls_baseline();
    return base == 0 ? 0.0
                     : 1.0 - static_cast<double>(mo_ls_total()) / static_cast<double>(base);
  }

 private:
  std::size_t n_;
  MessageCosts costs_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace posshare
