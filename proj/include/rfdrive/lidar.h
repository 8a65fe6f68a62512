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

#ifndef RFDRIVE_LIDAR_H_
#define RFDRIVE_LIDAR_H_

#include <numbers>
#include <random>
#include <vector>

#include "rfdrive/track.h"

namespace rfdrive {

// The sensor sits at the vehicle reference point. A dense scan has
// `dense_beams` beams at angles -fov/2 + j*fov/dense_beams; the downsampled
// scan keeps dense beams j = k*i + k/2 with k = dense_beams/num_beams, which
// puts one beam at the center of each of num_beams equal sectors.
struct LidarConfig {
  double fov = 1.5 * std::numbers::pi;
  double max_range = 10.0;
  int num_beams = 18;
  int dense_beams = 360;
  double noise_amplitude = 0.0;  // additive uniform noise, m

  int decimation() const { return dense_beams / num_beams; }
  double dense_angle(int j) const;
  double beam_angle(int i) const;
  std::vector<double> beam_angles() const;
};

void validate(const LidarConfig& config);

struct LidarScan {
  std::vector<double> ranges;
  std::vector<double> beam_angles;  // body frame, rad
  double max_range = 0.0;
};

// Vehicle outline used by the collision indicator and contact physics: a
// rectangle centered on the sensor, aligned with the body axes.
struct Footprint {
  double length = 0.5;
  double width = 0.3;
  double collision_margin = 0.05;

  // Distance from the sensor to the footprint edge along a body-frame angle.
  double extent(double angle) const;
  double circumradius() const;
};

void validate(const Footprint& footprint);

// Exact segment intersection against every boundary segment.
LidarScan raycast(const Pose2& pose, const TrackGeometry& track,
                  const LidarConfig& config);
LidarScan raycast_dense(const Pose2& pose, const TrackGeometry& track,
                        const LidarConfig& config);
LidarScan downsample(const LidarScan& dense, const LidarConfig& config);

void add_uniform_noise(LidarScan& scan, double amplitude, std::mt19937_64& rng);

// 1 iff some beam's range is <= footprint extent along it + margin.
int collision_indicator(const LidarScan& scan, const Footprint& footprint);

// Minimum range over all beams.
double min_range(const LidarScan& scan);

// Pose-level queries against a frozen track, for rollouts. collides(pose)
// returns exactly collision_indicator(raycast(pose, ...), footprint) but
// only visits segments near the pose.
class CollisionProbe {
 public:
  CollisionProbe(const TrackGeometry& track, const LidarConfig& lidar,
                 const Footprint& footprint, double clearance_cap = 0.6);

  bool collides(const Pose2& pose) const;

  // True if the footprint rectangle overlaps a boundary segment.
  bool footprint_overlaps(const Pose2& pose) const;

  // Distance from the sensor to the nearest boundary, capped at
  // clearance_cap.
  double clearance(const Vec2& p) const;

  const Footprint& footprint() const { return footprint_; }

 private:
  Footprint footprint_;
  double clearance_cap_;
  std::vector<double> beam_cos_, beam_sin_, beam_threshold_;
  SegmentIndex near_index_;
  SegmentIndex clearance_index_;
};

}  // namespace rfdrive

#endif  // RFDRIVE_LIDAR_H_
