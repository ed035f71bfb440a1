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


// posshare command-line tool.
//
// Exit codes: 0 success, 1 usage or malformed input, 2 infeasible input or
// unsatisfiable requirement. Failures print one line to stderr:
//   posshare: error code=<n> kind=<kind> message=<text>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "posshare/posshare.hpp"

namespace {

using namespace posshare;

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

int report_failure(const Failure& f) {
  std::string msg = f.message;
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "posshare: error code=" << f.code << " kind=" << f.kind << " message=" << msg
            << '\n';
  return f.code;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{1, "io", "cannot open " + path};
  return in;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw Failure{1, "io", "cannot write " + path};
}

struct GenerateArgs {
  double x = 0, y = 0, r0 = 0;
  std::size_t n = 0;
  std::string map, out;
};

void run_generate(const GenerateArgs& a, std::uint64_t seed) {
  Rng rng(seed);
  ShareSet set;
  if (a.map.empty()) {
    set = generate_osps({a.x, a.y}, a.n, a.r0, rng);
  } else {
    auto in = open_in(a.map);
    set = generate_csps(a.n, read_map_grid(in), a.r0, {a.x, a.y}, rng);
  }
  std::ostringstream os;
  write_shareset(os, set, seed);
  write_file(a.out, os.str());
}

struct FuseArgs {
  std::string shares, map, out;
  std::optional<std::size_t> k;
  std::vector<std::size_t> indices;
};

void run_fuse(const FuseArgs& a) {
  std::optional<std::uint64_t> seed;
  ShareSet set;
  {
    auto in = open_in(a.shares);
    set = read_shareset(in, &seed);
  }
  std::vector<RefinementShare> chosen;
  if (a.k) {
    if (*a.k > set.n()) throw Failure{1, "usage", "--k exceeds the number of shares"};
    chosen.assign(set.refinements.begin(),
                  set.refinements.begin() + static_cast<std::ptrdiff_t>(*a.k));
  } else {
    if (set.mode == Mode::csps) {
      throw Failure{1, "usage", "CSPS shares fuse as a prefix; use --k"};
    }
    std::vector<bool> seen(set.n(), false);
    for (auto i : a.indices) {
      if (i >= set.n() || seen[i]) throw Failure{1, "usage", "invalid or repeated share index"};
      seen[i] = true;
      chosen.push_back(set.refinements[i]);
    }
  }

  Json doc;
  doc["mode"] = to_string(set.mode);
  doc["k"] = chosen.size();
  if (set.mode == Mode::osps) {
    const auto c = fuse_osps(set, chosen);
    doc["x"] = c.center.x;
    doc["y"] = c.center.y;
    doc["r"] = c.radius;
  } else {
    if (a.map.empty()) throw Failure{1, "usage", "CSPS fusion needs --map"};
    auto in = open_in(a.map);
    const auto grid = read_map_grid(in);
    const auto area = fuse_csps(grid, set, chosen);
    Json circles = Json::array();
    for (const auto& c : area.circles) {
      circles.push_back({{"x", c.center.x}, {"y", c.center.y}, {"r", c.radius}});
    }
    doc["circles"] = std::move(circles);
    doc["area"] = area.area;
  }
  if (seed) doc["seed"] = *seed;
  write_file(a.out, doc.dump(2) + "\n");
}

struct PlaceArgs {
  std::string trust, req, out, comparison;
  std::size_t n = 0, m_min = 1;
  std::optional<double> r0;
};

// Returns false when the requirement cannot be met.
bool run_place(const PlaceArgs& a, std::uint64_t seed) {
  std::vector<TrustRecord> servers;
  PrivacyRequirement req;
  {
    auto in = open_in(a.trust);
    servers = read_trust_csv(in);
  }
  {
    auto in = open_in(a.req);
    req = read_requirement(in);
  }
  const double r0 = a.r0.value_or(static_cast<double>(a.n));
  const auto model = PrecisionModel::homogeneous(a.n, r0);

  Rng rng(seed);
  const auto outcome = select_and_place(req, a.n, servers, a.m_min, model, rng);
  write_file(a.out, to_json(outcome, seed).dump(2) + "\n");

  if (!a.comparison.empty()) {
    Rng cmp_rng(seed);
    const auto cmp = run_placement_experiment(servers, a.n, req, model, cmp_rng);
    std::ostringstream os;
    write_comparison_csv(os, cmp, seed);
    write_file(a.comparison, os.str());
  }
  return outcome.satisfied;
}

struct SimulateArgs {
  std::string trajectory, format = "auto", out, sweep_out;
  std::size_t n = 5;
  double r0 = 0;
  std::size_t basic_cost = 20, optimized_cost = 6;
  std::vector<double> sweep;
  std::optional<double> max_speed;
};

void run_simulate(const SimulateArgs& a, std::uint64_t seed) {
  TrajectoryFormat format = format_for(a.trajectory);
  if (a.format == "csv") format = TrajectoryFormat::simple_csv;
  if (a.format == "plt") format = TrajectoryFormat::geolife_plt;
  Trajectory traj;
  {
    auto in = open_in(a.trajectory);
    traj = read_trajectory(in, format);
  }
  const MessageCosts costs{a.basic_cost, a.optimized_cost};
  SuppressionPolicy suppression;
  if (a.max_speed) suppression = {true, *a.max_speed};

  Rng rng(seed);
  const auto ledger = run_update_experiment(traj, a.n, a.r0, costs, rng, suppression);
  std::ostringstream os;
  write_ledger_csv(os, ledger, {seed, a.n, a.r0, costs});
  write_file(a.out, os.str());

  if (!a.sweep.empty()) {
    if (a.sweep_out.empty()) throw Failure{1, "usage", "--r0-sweep needs --sweep-out"};
    const auto rows = run_r0_sweep(traj, a.n, a.sweep, costs, seed);
    std::ostringstream ss;
    write_sweep_csv(ss, rows, seed, a.n);
    write_file(a.sweep_out, ss.str());
  }
}

struct ReportArgs {
  std::vector<std::string> ledgers, comparisons;
  std::string out;
};

void run_report(const ReportArgs& a, std::uint64_t seed) {
  if (a.ledgers.empty() && a.comparisons.empty()) {
    throw Failure{1, "usage", "report needs --ledger or --comparison inputs"};
  }
  std::ostringstream os;
  os << "# seed=" << seed << '\n' << "source,metric,value\n";
  auto row = [&](const std::string& src, const char* metric, const std::string& value) {
    os << src << ',' << metric << ',' << value << '\n';
  };
  // Rows are labelled by file name so reports do not depend on where inputs live.
  auto name_of = [](const std::string& path) {
    return std::filesystem::path(path).filename().string();
  };
  for (const auto& path : a.ledgers) {
    auto in = open_in(path);
    const auto file = read_ledger_csv(in);
    const auto src = name_of(path);
    std::size_t basic = 0, optimized = 0, suppressed = 0, total = 0, mo_ls = 0;
    for (const auto& e : file.entries) {
      basic += e.kind == UpdateKind::basic;
      optimized += e.kind == UpdateKind::optimized;
      suppressed += e.kind == UpdateKind::suppressed;
      total += e.total();
      mo_ls += e.mo_ls;
    }
    const std::size_t baseline = file.entries.size() * file.header.costs.basic;
    const std::size_t mo_ls_baseline = file.entries.size() * file.header.n;
    auto ratio = [](std::size_t part, std::size_t whole) {
      return whole == 0 ? 0.0 : 1.0 - static_cast<double>(part) / static_cast<double>(whole);
    };
    row(src, "seed", std::to_string(file.header.seed));
    row(src, "n", std::to_string(file.header.n));
    row(src, "r0", format_double(file.header.r0));
    row(src, "updates", std::to_string(file.entries.size()));
    row(src, "basic", std::to_string(basic));
    row(src, "optimized", std::to_string(optimized));
    row(src, "suppressed", std::to_string(suppressed));
    row(src, "total_messages", std::to_string(total));
    row(src, "baseline_messages", std::to_string(baseline));
    row(src, "reduction_ratio", format_double(ratio(total, baseline)));
    row(src, "mo_ls_messages", std::to_string(mo_ls));
    row(src, "mo_ls_reduction_ratio", format_double(ratio(mo_ls, mo_ls_baseline)));
  }
  for (const auto& path : a.comparisons) {
    auto in = open_in(path);
    const auto file = read_comparison_csv(in);
    const auto src = name_of(path);
    ComparisonRow widest;
    for (const auto& r : file.rows) {
      if (r.delta > widest.delta) widest = r;
    }
    row(src, "seed", std::to_string(file.seed));
    row(src, "uniform_objective", format_double(file.uniform_objective));
    row(src, "optimized_objective", format_double(file.optimized_objective));
    row(src, "max_delta", format_double(widest.delta));
    row(src, "phi_at_max_delta", format_double(widest.phi));
  }
  write_file(a.out, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position sharing for location privacy on non-trusted servers"};
  app.require_subcommand(1);
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--seed", seed, "Random seed, echoed into every output")
      ->capture_default_str();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a share set for a position");
  generate->add_option("--x", gen.x, "Position x (meters)")->required();
  generate->add_option("--y", gen.y, "Position y (meters)")->required();
  generate->add_option("--n", gen.n, "Number of refinement shares")->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--r0", gen.r0, "Master share radius (meters)")->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--map", gen.map, "Map grid file; selects constrained-space shares")
      ->check(CLI::ExistingFile);
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("--out", gen.out, "Output share set JSON")->required();

  FuseArgs fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse a master share with refinement shares");
  fuse_cmd->add_option("--shares", fuse.shares, "Share set JSON")->required()
      ->check(CLI::ExistingFile);
  auto* k_opt = fuse_cmd->add_option("--k", fuse.k, "Fuse the first k refinement shares");
  auto* idx_opt = fuse_cmd->add_option("--indices", fuse.indices,
                                       "Fuse these refinement shares (0-based)")
                      ->delimiter(',');
  k_opt->excludes(idx_opt);
  fuse_cmd->add_option("--map", fuse.map, "Map grid file (CSPS)")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--out", fuse.out, "Output JSON")->required();

  PlaceArgs place;
  auto* place_cmd = app.add_subcommand("place", "Place shares on location servers");
  place_cmd->add_option("--trust", place.trust, "Trust database CSV (server_id,risk)")
      ->required()->check(CLI::ExistingFile);
  place_cmd->add_option("--req", place.req, "Privacy requirement JSON")->required()
      ->check(CLI::ExistingFile);
  place_cmd->add_option("--n", place.n, "Number of refinement shares")->required()
      ->check(CLI::PositiveNumber);
  place_cmd->add_option("--m-min", place.m_min, "Minimum number of servers")
      ->capture_default_str()->check(CLI::PositiveNumber);
  place_cmd->add_option("--r0", place.r0,
                        "Master share radius; precision gain per share is r0/n (default n)")
      ->check(CLI::PositiveNumber);
  place_cmd->add_option("--seed", seed, "Random seed");
  place_cmd->add_option("--out", place.out, "Output placement JSON")->required();
  place_cmd->add_option("--comparison", place.comparison,
                        "Also write a uniform vs optimized comparison CSV");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Replay a trajectory through the update protocol");
  sim_cmd->add_option("--trajectory", sim.trajectory, "Trajectory file (.csv or .plt)")
      ->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--format", sim.format, "Trajectory format")
      ->capture_default_str()->check(CLI::IsMember({"auto", "csv", "plt"}));
  sim_cmd->add_option("--n", sim.n, "Number of refinement shares")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--r0", sim.r0, "Master share radius (meters)")->required()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--basic-cost", sim.basic_cost, "Messages per basic update")
      ->capture_default_str();
  sim_cmd->add_option("--optimized-cost", sim.optimized_cost,
                      "Messages per optimized update")
      ->capture_default_str();
  sim_cmd->add_option("--max-speed", sim.max_speed,
                      "Suppress updates faster than this speed allows (m/s)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--r0-sweep", sim.sweep, "Radii for a saving-ratio sweep")
      ->delimiter(',');
  sim_cmd->add_option("--sweep-out", sim.sweep_out, "Output sweep CSV");
  sim_cmd->add_option("--seed", seed, "Random seed");
  sim_cmd->add_option("--out", sim.out, "Output ledger CSV")->required();

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Summarize ledgers and comparison tables");
  report_cmd->add_option("--ledger", rep.ledgers, "Ledger CSV (repeatable)")
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--comparison", rep.comparisons, "Comparison CSV (repeatable)")
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--seed", seed, "Seed echoed into the summary");
  report_cmd->add_option("--out", rep.out, "Output summary CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_failure({1, "usage", e.what()});
    const CLI::App* cmd = &app;
    for (auto* sub : app.get_subcommands()) cmd = sub;
    std::cout << cmd->help();
    return 1;
  }

  try {
    if (*generate) {
      run_generate(gen, seed);
    } else if (*fuse_cmd) {
      if (!fuse.k && idx_opt->count() == 0) {
        throw Failure{1, "usage", "fuse needs --k or --indices"};
      }
      run_fuse(fuse);
    } else if (*place_cmd) {
      if (!run_place(place, seed)) {
        return report_failure({2, "unsatisfied", "requirement not met by any placement"});
      }
    } else if (*sim_cmd) {
      run_simulate(sim, seed);
    } else if (*report_cmd) {
      run_report(rep, seed);
    }
  } catch (const Failure& f) {
    return report_failure(f);
  } catch (const InfeasibleError& e) {
    return report_failure({2, "infeasible", e.what()});
  } catch (const ParseError& e) {
    return report_failure({1, "parse", e.what()});
  } catch (const std::invalid_argument& e) {
    return report_failure({1, "invalid", e.what()});
  } catch (const std::exception& e) {
    return report_failure({1, "error", e.what()});
  }
  return 0;
}
