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


// File formats: share sets, requirements and placements as JSON; trust
// databases, ledgers and comparison tables as CSV. Writers are
// deterministic: fixed field order and shortest round-trip numbers.

#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "posshare/error.hpp"
#include "posshare/placement.hpp"
#include "posshare/privacy.hpp"
#include "posshare/shares.hpp"
#include "posshare/sim.hpp"
#include "posshare/trajectory.hpp"
#include "posshare/update.hpp"

namespace posshare {

using Json = nlohmann::ordered_json;

// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) throw ParseError("expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const Json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(std::string("field '") + key + "' must be finite");
  return d;
}

inline Json parse_json(std::istream& in) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

inline std::optional<std::uint64_t> seed_of(const Json& doc) {
  const auto it = doc.find("seed");
  if (it == doc.end() || !it->is_number_unsigned()) return std::nullopt;
  return it->get<std::uint64_t>();
}

}  // namespace detail

inline Json to_json(const ShareSet& set, std::optional<std::uint64_t> seed = {}) {
  Json doc;
  doc["mode"] = to_string(set.mode);
  doc["n"] = set.n();
  doc["delta_r"] = set.delta_r;
  doc["master"] = {{"x", set.master.circle.center.x},
                   {"y", set.master.circle.center.y},
                   {"r", set.master.circle.radius}};
  Json shares = Json::array();
  for (const auto& s : set.refinements) {
    Json rec{{"dx", s.shift.dx}, {"dy", s.shift.dy}};
    if (s.radius) rec["r"] = *s.radius;
    shares.push_back(std::move(rec));
  }
  doc["shares"] = std::move(shares);
  if (seed) doc["seed"] = *seed;
  return doc;
}

inline ShareSet shareset_from_json(const Json& doc) {
  ShareSet set;
  const auto& mode = detail::field(doc, "mode");
  if (mode == "OSPS") {
    set.mode = Mode::osps;
  } else if (mode == "CSPS") {
    set.mode = Mode::csps;
  } else {
    throw ParseError("mode must be \"OSPS\" or \"CSPS\"");
  }
  const auto& n = detail::field(doc, "n");
  if (!n.is_number_unsigned()) throw ParseError("n must be a non-negative integer");
  set.delta_r = detail::number(doc, "delta_r");
  const auto& master = detail::field(doc, "master");
  set.master.circle = {{detail::number(master, "x"), detail::number(master, "y")},
                       detail::number(master, "r")};
  if (set.master.circle.radius < 0.0) throw ParseError("master radius must be non-negative");
  const auto& shares = detail::field(doc, "shares");
  if (!shares.is_array()) throw ParseError("shares must be an array");
  for (const auto& rec : shares) {
    RefinementShare s;
    s.shift = {detail::number(rec, "dx"), detail::number(rec, "dy")};
    if (rec.contains("r")) s.radius = detail::number(rec, "r");
    if (set.mode == Mode::csps && !s.radius) throw ParseError("CSPS share is missing 'r'");
    set.refinements.push_back(s);
  }
  if (n.get<std::size_t>() != set.n()) throw ParseError("n does not match the share count");
  return set;
}

inline void write_shareset(std::ostream& out, const ShareSet& set,
                           std::optional<std::uint64_t> seed = {}) {
  out << to_json(set, seed).dump(2) << '\n';
}

inline ShareSet read_shareset(std::istream& in, std::optional<std::uint64_t>* seed = nullptr) {
  const auto doc = detail::parse_json(in);
  if (seed) *seed = detail::seed_of(doc);
  return shareset_from_json(doc);
}

// {"levels": [{"phi": ..., "p": ...}, ...]}
inline PrivacyRequirement read_requirement(std::istream& in) {
  const auto doc = detail::parse_json(in);
  const auto& levels = detail::field(doc, "levels");
  if (!levels.is_array()) throw ParseError("levels must be an array");
  PrivacyRequirement req;
  for (const auto& level : levels) {
    req.levels.push_back({detail::number(level, "phi"), detail::number(level, "p")});
  }
  try {
    req.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return req;
}

inline void write_requirement(std::ostream& out, const PrivacyRequirement& req) {
  Json levels = Json::array();
  for (const auto& l : req.levels) levels.push_back({{"phi", l.phi}, {"p", l.p}});
  out << Json{{"levels", std::move(levels)}}.dump(2) << '\n';
}

// CSV with header `server_id,risk`. Ids must be unique.
inline std::vector<TrustRecord> read_trust_csv(std::istream& in) {
  std::vector<TrustRecord> out;
  std::set<std::string, std::less<>> ids;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split_csv(text);
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "server_id" || fields[1] != "risk") {
        throw ParseError("expected header 'server_id,risk'", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError("expected '<server_id>,<risk>'", line_no);
    }
    const auto risk = detail::parse_double(fields[1]);
    if (!risk || *risk < 0.0 || *risk > 1.0) throw ParseError("risk must lie in [0, 1]", line_no);
    if (!ids.emplace(fields[0]).second) throw ParseError("duplicate server id", line_no);
    out.push_back({std::string(fields[0]), *risk});
  }
  if (out.empty()) throw ParseError("trust database has no servers");
  return out;
}

inline void write_trust_csv(std::ostream& out, const std::vector<TrustRecord>& servers) {
  out << "server_id,risk\n";
  for (const auto& s : servers) out << s.server_id << ',' << format_double(s.risk) << '\n';
}

// Curve entries are {phi, p} with p = Pr[attacker precision <= phi].
inline Json to_json(const PlacementOutcome& outcome, std::optional<std::uint64_t> seed = {}) {
  Json doc;
  Json servers = Json::array();
  for (const auto& s : outcome.placement.servers) servers.push_back(s.server_id);
  doc["servers"] = std::move(servers);
  doc["assignment"] = outcome.placement.assignment;
  doc["objective"] = outcome.objective;
  doc["satisfied"] = outcome.satisfied;
  Json curve = Json::array();
  for (const auto& pt : outcome.curve.points) {
    curve.push_back({{"phi", pt.phi}, {"p", outcome.curve.probability_at(pt.phi)}});
  }
  doc["curve"] = std::move(curve);
  if (seed) doc["seed"] = *seed;
  return doc;
}

struct LedgerHeader {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double r0 = 0.0;
  MessageCosts costs;
};

inline void write_ledger_csv(std::ostream& out, const MessageLedger& ledger,
                             const LedgerHeader& header) {
  out << "# seed=" << header.seed << " n=" << header.n << " r0=" << format_double(header.r0)
      << " basic_cost=" << header.costs.basic << " optimized_cost=" << header.costs.optimized
      << '\n';
  out << "update_index,kind,mo_ls,ls_lba\n";
  for (const auto& e : ledger.entries()) {
    out << e.update_index << ',' << to_string(e.kind) << ',' << e.mo_ls << ',' << e.ls_lba
        << '\n';
  }
}

struct LedgerFile {
  LedgerHeader header;
  std::vector<LedgerEntry> entries;
};

namespace detail {

inline std::size_t parse_count(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("expected a non-negative integer", line_no);
  }
  return v;
}

inline void parse_ledger_comment(std::string_view text, LedgerHeader& h, std::size_t line_no) {
  text.remove_prefix(1);
  while (!text.empty()) {
    text = trim(text);
    const auto end = text.find(' ');
    const auto token = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "seed") {
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), h.seed);
      if (ec != std::errc{}) throw ParseError("malformed seed", line_no);
    } else if (key == "n") {
      h.n = parse_count(value, line_no);
    } else if (key == "r0") {
      const auto r0 = parse_double(value);
      if (!r0) throw ParseError("malformed r0", line_no);
      h.r0 = *r0;
    } else if (key == "basic_cost") {
      h.costs.basic = parse_count(value, line_no);
    } else if (key == "optimized_cost") {
      h.costs.optimized = parse_count(value, line_no);
    }
  }
}

}  // namespace detail

inline LedgerFile read_ledger_csv(std::istream& in) {
  LedgerFile file;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      detail::parse_ledger_comment(text, file.header, line_no);
      continue;
    }
    const auto fields = detail::split_csv(text);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "update_index" || fields[1] != "kind" ||
          fields[2] != "mo_ls" || fields[3] != "ls_lba") {
        throw ParseError("expected header 'update_index,kind,mo_ls,ls_lba'", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
    LedgerEntry e;
    e.update_index = detail::parse_count(fields[0], line_no);
    if (fields[1] == "basic") {
      e.kind = UpdateKind::basic;
    } else if (fields[1] == "optimized") {
      e.kind = UpdateKind::optimized;
    } else if (fields[1] == "suppressed") {
      e.kind = UpdateKind::suppressed;
    } else {
      throw ParseError("unknown update kind", line_no);
    }
    e.mo_ls = detail::parse_count(fields[2], line_no);
    e.ls_lba = detail::parse_count(fields[3], line_no);
    file.entries.push_back(e);
  }
  if (!have_header) throw ParseError("ledger has no header");
  return file;
}

inline void write_comparison_csv(std::ostream& out, const PlacementComparison& cmp,
                                 std::uint64_t seed) {
  out << "# seed=" << seed << " uniform_objective=" << format_double(cmp.uniform_objective)
      << " optimized_objective=" << format_double(cmp.optimized_objective) << '\n';
  out << "phi,p_uniform,p_optimized,delta\n";
  for (const auto& row : cmp.rows) {
    out << format_double(row.phi) << ',' << format_double(row.p_uniform) << ','
        << format_double(row.p_optimized) << ',' << format_double(row.delta) << '\n';
  }
}

struct ComparisonFile {
  std::uint64_t seed = 0;
  double uniform_objective = 0.0;
  double optimized_objective = 0.0;
  std::vector<ComparisonRow> rows;
};

inline ComparisonFile read_comparison_csv(std::istream& in) {
  ComparisonFile file;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      text.remove_prefix(1);
      std::istringstream ss{std::string(text)};
      std::string token;
      while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string_view key(token.data(), eq);
        const std::string_view value(token.data() + eq + 1, token.size() - eq - 1);
        if (key == "seed") {
          std::from_chars(value.data(), value.data() + value.size(), file.seed);
        } else if (key == "uniform_objective") {
          file.uniform_objective = detail::parse_double(value).value_or(0.0);
        } else if (key == "optimized_objective") {
          file.optimized_objective = detail::parse_double(value).value_or(0.0);
        }
      }
      continue;
    }
    const auto fields = detail::split_csv(text);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "phi" || fields[1] != "p_uniform" ||
          fields[2] != "p_optimized" || fields[3] != "delta") {
        throw ParseError("expected header 'phi,p_uniform,p_optimized,delta'", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
    ComparisonRow row;
    double* slots[] = {&row.phi, &row.p_uniform, &row.p_optimized, &row.delta};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) throw ParseError("malformed number", line_no);
      *slots[i] = *v;
    }
    file.rows.push_back(row);
  }
  if (!have_header) throw ParseError("comparison table has no header");
  return file;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                            std::uint64_t seed, std::size_t n) {
  out << "# seed=" << seed << " n=" << n << '\n';
  out << "r0,updates,optimized,total,baseline,saving_ratio\n";
  for (const auto& r : rows) {
    out << format_double(r.r0) << ',' << r.updates << ',' << r.optimized << ',' << r.total
        << ',' << r.baseline << ',' << format_double(r.saving_ratio) << '\n';
  }
}

}  // namespace posshare
