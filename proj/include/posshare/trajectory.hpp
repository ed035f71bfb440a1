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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "posshare/error.hpp"
#include "posshare/geometry.hpp"

namespace posshare {

struct Fix {
  double t = 0.0;  // seconds
  Point position;  // planar meters

  friend bool operator==(const Fix&, const Fix&) = default;
};

struct GeoAnchor {
  double lat = 0.0;
  double lon = 0.0;
};

struct Trajectory {
  std::vector<Fix> fixes;
  // Projection origin when the input was geographic.
  std::optional<GeoAnchor> anchor;
};

enum class TrajectoryFormat {
  // Header `t,lat,lon` (degrees, projected) or `t,x,y` (planar meters).
  simple_csv,
  // GeoLife .plt: six header lines, then lat,lon,0,altitude,days,date,time.
  geolife_plt,
};

inline constexpr double kEarthRadiusMeters = 6371008.8;

// Local equirectangular projection around `anchor`.
inline Point project(const GeoAnchor& anchor, double lat, double lon) noexcept {
  constexpr double kRad = std::numbers::pi / 180.0;
  return {kEarthRadiusMeters * (lon - anchor.lon) * kRad * std::cos(anchor.lat * kRad),
          kEarthRadiusMeters * (lat - anchor.lat) * kRad};
}

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) noexcept {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline void push_fix(Trajectory& traj, double t, Point p, std::size_t line_no) {
  if (!traj.fixes.empty() && !(t > traj.fixes.back().t)) {
    throw ParseError("timestamps must be strictly increasing", line_no);
  }
  traj.fixes.push_back({t, p});
}

inline void check_lat_lon(double lat, double lon, std::size_t line_no) {
  if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) {
    throw ParseError("latitude/longitude out of range", line_no);
  }
}

}  // namespace detail

inline Trajectory read_trajectory(std::istream& in, TrajectoryFormat format) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;

  if (format == TrajectoryFormat::geolife_plt) {
    while (line_no < 6) {
      if (!std::getline(in, line)) throw ParseError("truncated PLT header", line_no);
      ++line_no;
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      const auto fields = detail::split_csv(line);
      if (fields.size() < 5) throw ParseError("expected at least 5 PLT fields", line_no);
      const auto lat = detail::parse_double(fields[0]);
      const auto lon = detail::parse_double(fields[1]);
      const auto days = detail::parse_double(fields[4]);
      if (!lat || !lon || !days) throw ParseError("malformed PLT number", line_no);
      detail::check_lat_lon(*lat, *lon, line_no);
      if (!traj.anchor) traj.anchor = GeoAnchor{*lat, *lon};
      detail::push_fix(traj, *days * 86400.0, project(*traj.anchor, *lat, *lon), line_no);
    }
  } else {
    bool geographic = true;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      const auto text = detail::trim(line);
      if (text.empty() || text.front() == '#') continue;
      const auto fields = detail::split_csv(text);
      if (!have_header) {
        if (fields.size() == 3 && fields[0] == "t" && fields[1] == "lat" && fields[2] == "lon") {
          geographic = true;
        } else if (fields.size() == 3 && fields[0] == "t" && fields[1] == "x" &&
                   fields[2] == "y") {
          geographic = false;
        } else {
          throw ParseError("expected header 't,lat,lon' or 't,x,y'", line_no);
        }
        have_header = true;
        continue;
      }
      if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
      const auto t = detail::parse_double(fields[0]);
      const auto a = detail::parse_double(fields[1]);
      const auto b = detail::parse_double(fields[2]);
      if (!t || !a || !b) throw ParseError("malformed number", line_no);
      Point p{*a, *b};
      if (geographic) {
        detail::check_lat_lon(*a, *b, line_no);
        if (!traj.anchor) traj.anchor = GeoAnchor{*a, *b};
        p = project(*traj.anchor, *a, *b);
      }
      detail::push_fix(traj, *t, p, line_no);
    }
  }
  if (traj.fixes.empty()) throw ParseError("trajectory has no fixes");
  return traj;
}

inline TrajectoryFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".plt" ? TrajectoryFormat::geolife_plt
                                    : TrajectoryFormat::simple_csv;
}

inline Trajectory load_trajectory(const std::filesystem::path& path, TrajectoryFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file: " + path.string());
  return read_trajectory(in, format);
}

}  // namespace posshare
