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

#ifndef RFDRIVE_TRACK_H_
#define RFDRIVE_TRACK_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rfdrive {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

// Closed polyline: the last vertex connects back to the first.
using Polyline = std::vector<Vec2>;

struct Segment {
  Vec2 a;
  Vec2 b;
};

struct TrackGeometry {
  Polyline outer;
  Polyline inner;
  Pose2 spawn;

  std::vector<Segment> segments() const;
};

// Regular polygons at r_in and r_out around the origin. The spawn pose sits
// on the centerline at angle 0 heading counter-clockwise.
TrackGeometry make_annulus(double r_in, double r_out, int n_vertices);

// Throws ConfigError unless both boundaries are simple closed polylines, the
// inner one lies strictly inside the outer one and the spawn point lies in
// the annulus between them.
void validate_track(const TrackGeometry& track);

// Text format: one "x y" pair per line, a blank line between the outer and
// the inner boundary. An optional third block holds one "x y yaw" spawn
// line; without it the spawn is placed midway between the first outer
// vertex and the nearest inner vertex. Lines starting with '#' are ignored.
TrackGeometry parse_track(std::istream& in);
TrackGeometry load_track_file(const std::string& path);
void write_track(std::ostream& out, const TrackGeometry& track);

bool point_in_polygon(const Vec2& p, const Polyline& poly);
double point_segment_distance(const Vec2& p, const Segment& s);

// Uniform grid that returns every segment within `radius` of a query point
// (plus a few extra). Points off the grid are farther than `radius` from
// all segments.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  SegmentIndex(std::vector<Segment> segments, double radius,
               double cell_size = 0.2);

  std::span<const std::uint32_t> candidates(const Vec2& p) const;
  const std::vector<Segment>& segments() const { return segments_; }
  double radius() const { return radius_; }

 private:
  std::vector<Segment> segments_;
  double radius_ = 0.0;
  double cell_ = 1.0;
  double x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::uint32_t> offsets_;  // CSR row starts, size nx*ny+1
  std::vector<std::uint32_t> items_;
};

}  // namespace rfdrive

#endif  // RFDRIVE_TRACK_H_
