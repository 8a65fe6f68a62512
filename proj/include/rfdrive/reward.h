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

#ifndef RFDRIVE_REWARD_H_
#define RFDRIVE_REWARD_H_

#include <cmath>

#include "rfdrive/vehicle.h"

namespace rfdrive {

struct RewardConfig {
  double w_v = 1.0;
  double w_c = 1.0;
  double gamma = 0.99;
};

void validate(const RewardConfig& config);

// r = w_v * v - w_c * |v| * collided
inline double compute_reward(double v, int collided, const RewardConfig& c) {
  return c.w_v * v - c.w_c * std::abs(v) * collided;
}

// Residual composition with collision override: without contact the base
// action is added with weight w_b; in contact the base action replaces the
// forward action outright.
inline ControlCommand compose_action(const ControlCommand& forward,
                                     const ControlCommand& base, int collided,
                                     double w_b, const VehicleParams& params) {
  if (collided) return base;
  return clamp_command(
      {forward.v + w_b * base.v, forward.delta + w_b * base.delta}, params);
}

}  // namespace rfdrive

#endif  // RFDRIVE_REWARD_H_
