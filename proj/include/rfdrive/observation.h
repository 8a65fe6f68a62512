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

#ifndef RFDRIVE_OBSERVATION_H_
#define RFDRIVE_OBSERVATION_H_

#include <deque>
#include <span>
#include <vector>

#include "rfdrive/vehicle.h"

namespace rfdrive {

inline constexpr int kHistoryLength = 3;
inline constexpr int kHistorySlots = kHistoryLength + 1;
inline constexpr int kScalarChannels = 4;  // v, omega, accel, delta
inline constexpr int kActionChannels = 2;

// Raw measurements that make up one history slot.
struct SensorSnapshot {
  double v = 0.0;
  double omega = 0.0;
  double accel = 0.0;
  double delta = 0.0;
  std::vector<double> ranges;
  ControlCommand base_action;

  friend bool operator==(const SensorSnapshot&, const SensorSnapshot&) =
      default;
};

// Physical ranges mapped affinely onto [0, 1]; values outside are clipped.
struct NormalizationBounds {
  double v = 3.0;
  double omega = 6.0;
  double accel = 15.0;
  double delta = 0.4189;
  double max_range = 10.0;
  double action_v = 3.0;
  double action_delta = 0.4189;
};

double normalize(double value, double lo, double hi);

inline constexpr int slot_width(int num_beams) {
  return kScalarChannels + num_beams + kActionChannels;
}

inline constexpr int observation_dim(int num_beams) {
  return kHistorySlots * slot_width(num_beams);
}

// Flattened state vector: kHistorySlots slots ordered oldest to newest,
// each [v, omega, accel, delta, ranges..., base_v, base_delta].
struct Observation {
  std::vector<double> values;
  int num_beams = 0;

  std::span<const double> slot(int i) const {
    const int w = slot_width(num_beams);
    return {values.data() + static_cast<std::size_t>(i) * w,
            static_cast<std::size_t>(w)};
  }
  std::span<const double> newest() const { return slot(kHistorySlots - 1); }

  friend bool operator==(const Observation&, const Observation&) = default;
};

class ObservationBuilder {
 public:
  explicit ObservationBuilder(const NormalizationBounds& bounds = {})
      : bounds_(bounds) {}

  // Fills every slot with the same snapshot.
  void bootstrap(const SensorSnapshot& snapshot);
  // Drops the oldest slot and appends the snapshot as the newest.
  void push(const SensorSnapshot& snapshot);
  Observation current() const;

  std::vector<double> encode(const SensorSnapshot& snapshot) const;
  const NormalizationBounds& bounds() const { return bounds_; }

 private:
  NormalizationBounds bounds_;
  std::deque<std::vector<double>> slots_;
  int num_beams_ = 0;
};

}  // namespace rfdrive

#endif  // RFDRIVE_OBSERVATION_H_
