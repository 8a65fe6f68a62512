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

#include "rfdrive/observation.h"

#include <algorithm>
#include <cmath>

#include "rfdrive/errors.h"

namespace rfdrive {

double normalize(double value, double lo, double hi) {
  if (!(hi > lo)) return 0.5;
  if (std::isnan(value)) return 0.5;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<double> ObservationBuilder::encode(const SensorSnapshot& s) const {
  const NormalizationBounds& b = bounds_;
  std::vector<double> out;
  out.reserve(slot_width(static_cast<int>(s.ranges.size())));
  out.push_back(normalize(s.v, -b.v, b.v));
  out.push_back(normalize(s.omega, -b.omega, b.omega));
  out.push_back(normalize(s.accel, -b.accel, b.accel));
  out.push_back(normalize(s.delta, -b.delta, b.delta));
  for (const double r : s.ranges) out.push_back(normalize(r, 0.0, b.max_range));
  out.push_back(normalize(s.base_action.v, -b.action_v, b.action_v));
  out.push_back(
      normalize(s.base_action.delta, -b.action_delta, b.action_delta));
  return out;
}

void ObservationBuilder::bootstrap(const SensorSnapshot& snapshot) {
  num_beams_ = static_cast<int>(snapshot.ranges.size());
  slots_.assign(kHistorySlots, encode(snapshot));
}

void ObservationBuilder::push(const SensorSnapshot& snapshot) {
  if (slots_.empty()) throw UsageError("observation history not bootstrapped");
  if (static_cast<int>(snapshot.ranges.size()) != num_beams_) {
    throw UsageError("snapshot beam count changed mid-episode");
  }
  slots_.pop_front();
  slots_.push_back(encode(snapshot));
}

Observation ObservationBuilder::current() const {
  Observation obs;
  obs.num_beams = num_beams_;
  for (const auto& s : slots_) obs.values.insert(obs.values.end(), s.begin(), s.end());
  return obs;
}

}  // namespace rfdrive
