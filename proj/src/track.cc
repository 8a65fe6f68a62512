// Copyright 2026 The rfdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rfdrive/track.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "rfdrive/errors.h"

namespace rfdrive {
namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
Vec2 sub(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(sub(b, a), sub(c, a));
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

std::vector<Segment> ring_segments(const Polyline& p) {
  std::vector<Segment> out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.push_back({p[i], p[(i + 1) % p.size()]});
  }
  return out;
}

void check_simple(const Polyline& p, const char* name) {
  if (p.size() < 3) {
    throw ConfigError(std::string(name) + " boundary needs >= 3 vertices");
  }
  for (const Vec2& v : p) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw ConfigError(std::string(name) + " boundary has non-finite vertex");
    }
  }
  const auto segs = ring_segments(p);
  const std::size_t n = segs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(segs[i], segs[j])) {
        throw ConfigError(std::string(name) + " boundary self-intersects");
      }
    }
  }
}

}  // namespace

std::vector<Segment> TrackGeometry::segments() const {
  auto out = ring_segments(outer);
  auto in = ring_segments(inner);
  out.insert(out.end(), in.begin(), in.end());
  return out;
}

TrackGeometry make_annulus(double r_in, double r_out, int n_vertices) {
  if (!(r_in > 0.0) || !(r_out > r_in) || n_vertices < 3) {
    throw ConfigError("annulus needs 0 < r_in < r_out and >= 3 vertices");
  }
  TrackGeometry t;
  for (int i = 0; i < n_vertices; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n_vertices;
    t.outer.push_back({r_out * std::cos(a), r_out * std::sin(a)});
    t.inner.push_back({r_in * std::cos(a), r_in * std::sin(a)});
  }
  t.spawn = {0.5 * (r_in + r_out), 0.0, 0.5 * std::numbers::pi};
  return t;
}

bool point_in_polygon(const Vec2& p, const Polyline& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
  const Vec2 e = sub(s.b, s.a);
  const Vec2 w = sub(p, s.a);
  const double len2 = e.x * e.x + e.y * e.y;
  double t = len2 > 0.0 ? (w.x * e.x + w.y * e.y) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = w.x - t * e.x;
  const double dy = w.y - t * e.y;
  return std::sqrt(dx * dx + dy * dy);
}

void validate_track(const TrackGeometry& t) {
  if (t.outer.empty() || t.inner.empty()) {
    throw ConfigError("track boundary polyline is empty");
  }
  check_simple(t.outer, "outer");
  check_simple(t.inner, "inner");
  for (const Vec2& v : t.inner) {
    if (!point_in_polygon(v, t.outer)) {
      throw ConfigError("inner boundary is not inside the outer boundary");
    }
  }
  for (const Segment& a : ring_segments(t.outer)) {
    for (const Segment& b : ring_segments(t.inner)) {
      if (segments_intersect(a, b)) {
        throw ConfigError("inner and outer boundaries cross");
      }
    }
  }
  const Vec2 s{t.spawn.x, t.spawn.y};
  if (!point_in_polygon(s, t.outer) || point_in_polygon(s, t.inner)) {
    throw ConfigError("spawn pose is outside the drivable annulus");
  }
}

TrackGeometry parse_track(std::istream& in) {
  std::vector<std::vector<std::vector<double>>> blocks(1);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      if (!blocks.back().empty()) blocks.emplace_back();
      continue;
    }
    if (line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> values;
    double v;
    while (ls >> v) values.push_back(v);
    if (!ls.eof()) {
      throw ConfigError("track file line " + std::to_string(line_no) +
                        ": expected numbers");
    }
    blocks.back().push_back(std::move(values));
  }
  if (blocks.back().empty()) blocks.pop_back();
  if (blocks.size() < 2 || blocks.size() > 3) {
    throw ConfigError("track file needs 2 boundary blocks (+ optional spawn)");
  }
  TrackGeometry t;
  for (int b = 0; b < 2; ++b) {
    Polyline& poly = b == 0 ? t.outer : t.inner;
    for (const auto& row : blocks[b]) {
      if (row.size() != 2) throw ConfigError("boundary lines hold 'x y'");
      poly.push_back({row[0], row[1]});
    }
  }
  if (blocks.size() == 3) {
    if (blocks[2].size() != 1 || blocks[2][0].size() != 3) {
      throw ConfigError("spawn block holds one 'x y yaw' line");
    }
    t.spawn = {blocks[2][0][0], blocks[2][0][1], blocks[2][0][2]};
  } else {
    const Vec2 o = t.outer.front();
    const Vec2* best = &t.inner.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (const Vec2& v : t.inner) {
      const double d = std::hypot(v.x - o.x, v.y - o.y);
      if (d < best_d) best_d = d, best = &v;
    }
    const double mx = 0.5 * (o.x + best->x), my = 0.5 * (o.y + best->y);
    // Heading perpendicular to the outer->inner direction.
    t.spawn = {mx, my, std::atan2(best->y - o.y, best->x - o.x) -
                           0.5 * std::numbers::pi};
  }
  validate_track(t);
  return t;
}

TrackGeometry load_track_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open track file: " + path);
  return parse_track(in);
}

void write_track(std::ostream& out, const TrackGeometry& t) {
  out << std::setprecision(17);
  for (const Vec2& v : t.outer) out << v.x << ' ' << v.y << '\n';
  out << '\n';
  for (const Vec2& v : t.inner) out << v.x << ' ' << v.y << '\n';
  out << '\n' << t.spawn.x << ' ' << t.spawn.y << ' ' << t.spawn.yaw << '\n';
}

SegmentIndex::SegmentIndex(std::vector<Segment> segments, double radius,
                           double cell_size)
    : segments_(std::move(segments)), radius_(radius), cell_(cell_size) {
  if (segments_.empty()) throw ConfigError("segment index needs segments");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Segment& s : segments_) {
    xmin = std::min({xmin, s.a.x, s.b.x});
    xmax = std::max({xmax, s.a.x, s.b.x});
    ymin = std::min({ymin, s.a.y, s.b.y});
    ymax = std::max({ymax, s.a.y, s.b.y});
  }
  x0_ = xmin - radius_ - cell_;
  y0_ = ymin - radius_ - cell_;
  nx_ = static_cast<int>(std::ceil((xmax + radius_ + cell_ - x0_) / cell_));
  ny_ = static_cast<int>(std::ceil((ymax + radius_ + cell_ - y0_) / cell_));

  // Cell centers within radius + half-diagonal of a segment may hold points
  // within radius of it.
  const double reach = radius_ + cell_ * std::numbers::sqrt2 * 0.5 + 1e-9;
  std::vector<std::vector<std::uint32_t>> cells(
      static_cast<std::size_t>(nx_) * ny_);
  for (std::uint32_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    const int i0 = std::max(0, static_cast<int>((std::min(s.a.x, s.b.x) - reach - x0_) / cell_));
    const int i1 = std::min(nx_ - 1, static_cast<int>((std::max(s.a.x, s.b.x) + reach - x0_) / cell_));
    const int j0 = std::max(0, static_cast<int>((std::min(s.a.y, s.b.y) - reach - y0_) / cell_));
    const int j1 = std::min(ny_ - 1, static_cast<int>((std::max(s.a.y, s.b.y) + reach - y0_) / cell_));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const Vec2 c{x0_ + (i + 0.5) * cell_, y0_ + (j + 0.5) * cell_};
        if (point_segment_distance(c, s) <= reach) {
          cells[static_cast<std::size_t>(j) * nx_ + i].push_back(k);
        }
      }
    }
  }
  offsets_.reserve(cells.size() + 1);
  offsets_.push_back(0);
  for (const auto& c : cells) {
    items_.insert(items_.end(), c.begin(), c.end());
    offsets_.push_back(static_cast<std::uint32_t>(items_.size()));
  }
}

std::span<const std::uint32_t> SegmentIndex::candidates(const Vec2& p) const {
  const double fx = (p.x - x0_) / cell_;
  const double fy = (p.y - y0_) / cell_;
  if (!(fx >= 0.0 && fy >= 0.0 && fx < nx_ && fy < ny_)) return {};
  const std::size_t cell =
      static_cast<std::size_t>(fy) * nx_ + static_cast<std::size_t>(fx);
  return {items_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
}

}  // namespace rfdrive
