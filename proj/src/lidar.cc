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

#include "rfdrive/lidar.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfdrive/errors.h"

namespace rfdrive {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BodyFrame {
  double px, py, c, s;
  explicit BodyFrame(const Pose2& pose)
      : px(pose.x), py(pose.y), c(std::cos(pose.yaw)), s(std::sin(pose.yaw)) {}
  Vec2 operator()(const Vec2& p) const {
    const double dx = p.x - px, dy = p.y - py;
    return {dx * c + dy * s, -dx * s + dy * c};
  }
};

// Distance along the unit ray (dc, ds) from the body origin to segment a-b,
// or +inf if it misses. Parallel segments never register a hit.
double ray_hit(const Vec2& a, const Vec2& b, double dc, double ds) {
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double denom = dc * ey - ds * ex;
  if (denom == 0.0) return kInf;
  const double t = (a.x * ey - a.y * ex) / denom;
  const double u = (a.x * ds - a.y * dc) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return kInf;
  return t;
}

// Liang-Barsky clip of segment a-b against |x| <= hx, |y| <= hy.
bool segment_hits_box(const Vec2& a, const Vec2& b, double hx, double hy) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x + hx, hx - a.x, a.y + hy, hy - a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
    } else {
      const double r = q[k] / p[k];
      if (p[k] < 0.0) {
        t0 = std::max(t0, r);
      } else {
        t1 = std::min(t1, r);
      }
      if (t0 > t1) return false;
    }
  }
  return true;
}

LidarScan cast(const Pose2& pose, const TrackGeometry& track,
               const LidarConfig& config, const std::vector<double>& angles) {
  if (track.outer.empty() || track.inner.empty()) {
    throw ConfigError("cannot raycast against an empty track boundary");
  }
  const BodyFrame frame(pose);
  std::vector<Segment> body;
  for (const Segment& s : track.segments()) body.push_back({frame(s.a), frame(s.b)});

  LidarScan scan;
  scan.max_range = config.max_range;
  scan.beam_angles = angles;
  scan.ranges.resize(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double dc = std::cos(angles[i]), ds = std::sin(angles[i]);
    double best = kInf;
    for (const Segment& s : body) best = std::min(best, ray_hit(s.a, s.b, dc, ds));
    scan.ranges[i] = std::min(best, config.max_range);
  }
  return scan;
}

}  // namespace

double LidarConfig::dense_angle(int j) const {
  return -0.5 * fov + j * (fov / dense_beams);
}

double LidarConfig::beam_angle(int i) const {
  const int k = decimation();
  return dense_angle(k * i + k / 2);
}

std::vector<double> LidarConfig::beam_angles() const {
  std::vector<double> out(num_beams);
  for (int i = 0; i < num_beams; ++i) out[i] = beam_angle(i);
  return out;
}

void validate(const LidarConfig& c) {
  if (!(c.fov > 0.0 && c.fov <= 2.0 * std::numbers::pi)) {
    throw ConfigError("lidar.fov must be in (0, 2*pi]");
  }
  if (!(c.max_range > 0.0)) throw ConfigError("lidar.max_range must be > 0");
  if (c.num_beams < 1 || c.dense_beams < c.num_beams ||
      c.dense_beams % c.num_beams != 0) {
    throw ConfigError("lidar.dense_beams must be a multiple of num_beams");
  }
  if (!(c.noise_amplitude >= 0.0)) {
    throw ConfigError("lidar.noise_amplitude must be >= 0");
  }
}

double Footprint::extent(double angle) const {
  const double hx = 0.5 * length, hy = 0.5 * width;
  const double c = std::abs(std::cos(angle)), s = std::abs(std::sin(angle));
  const double ex = c > 0.0 ? hx / c : kInf;
  const double ey = s > 0.0 ? hy / s : kInf;
  return std::min(ex, ey);
}

double Footprint::circumradius() const {
  return 0.5 * std::hypot(length, width);
}

void validate(const Footprint& f) {
  if (!(f.length > 0.0) || !(f.width > 0.0) || !(f.collision_margin >= 0.0)) {
    throw ConfigError("footprint dimensions must be positive");
  }
}

LidarScan raycast(const Pose2& pose, const TrackGeometry& track,
                  const LidarConfig& config) {
  return cast(pose, track, config, config.beam_angles());
}

LidarScan raycast_dense(const Pose2& pose, const TrackGeometry& track,
                        const LidarConfig& config) {
  std::vector<double> angles(config.dense_beams);
  for (int j = 0; j < config.dense_beams; ++j) angles[j] = config.dense_angle(j);
  return cast(pose, track, config, angles);
}

LidarScan downsample(const LidarScan& dense, const LidarConfig& config) {
  const int k = config.decimation();
  LidarScan out;
  out.max_range = dense.max_range;
  for (int i = 0; i < config.num_beams; ++i) {
    out.ranges.push_back(dense.ranges.at(k * i + k / 2));
    out.beam_angles.push_back(dense.beam_angles.at(k * i + k / 2));
  }
  return out;
}

void add_uniform_noise(LidarScan& scan, double amplitude,
                       std::mt19937_64& rng) {
  if (amplitude <= 0.0) return;
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  for (double& r : scan.ranges) {
    r = std::clamp(r + noise(rng), 1e-6, scan.max_range);
  }
}

int collision_indicator(const LidarScan& scan, const Footprint& footprint) {
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    if (scan.ranges[i] <=
        footprint.extent(scan.beam_angles[i]) + footprint.collision_margin) {
      return 1;
    }
  }
  return 0;
}

double min_range(const LidarScan& scan) {
  return *std::min_element(scan.ranges.begin(), scan.ranges.end());
}

CollisionProbe::CollisionProbe(const TrackGeometry& track,
                               const LidarConfig& lidar,
                               const Footprint& footprint,
                               double clearance_cap)
    : footprint_(footprint), clearance_cap_(clearance_cap) {
  validate(lidar);
  validate(footprint);
  if (track.outer.empty() || track.inner.empty()) {
    throw ConfigError("collision probe needs a non-empty track");
  }
  for (const double a : lidar.beam_angles()) {
    beam_cos_.push_back(std::cos(a));
    beam_sin_.push_back(std::sin(a));
    beam_threshold_.push_back(footprint.extent(a) + footprint.collision_margin);
  }
  const double reach = footprint.circumradius() + footprint.collision_margin;
  near_index_ = SegmentIndex(track.segments(), reach + 1e-6);
  clearance_index_ = SegmentIndex(track.segments(), clearance_cap_);
}

bool CollisionProbe::collides(const Pose2& pose) const {
  const auto cand = near_index_.candidates({pose.x, pose.y});
  if (cand.empty()) return false;
  const BodyFrame frame(pose);
  const auto& segs = near_index_.segments();
  for (const std::uint32_t k : cand) {
    const Vec2 a = frame(segs[k].a), b = frame(segs[k].b);
    for (std::size_t i = 0; i < beam_cos_.size(); ++i) {
      if (ray_hit(a, b, beam_cos_[i], beam_sin_[i]) <= beam_threshold_[i]) {
        return true;
      }
    }
  }
  return false;
}

bool CollisionProbe::footprint_overlaps(const Pose2& pose) const {
  const auto cand = near_index_.candidates({pose.x, pose.y});
  if (cand.empty()) return false;
  const BodyFrame frame(pose);
  const auto& segs = near_index_.segments();
  const double hx = 0.5 * footprint_.length, hy = 0.5 * footprint_.width;
  for (const std::uint32_t k : cand) {
    if (segment_hits_box(frame(segs[k].a), frame(segs[k].b), hx, hy)) {
      return true;
    }
  }
  return false;
}

double CollisionProbe::clearance(const Vec2& p) const {
  double best = clearance_cap_;
  const auto& segs = clearance_index_.segments();
  for (const std::uint32_t k : clearance_index_.candidates(p)) {
    best = std::min(best, point_segment_distance(p, segs[k]));
  }
  return best;
}

}  // namespace rfdrive
