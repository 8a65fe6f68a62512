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

#ifndef RFDRIVE_VEHICLE_H_
#define RFDRIVE_VEHICLE_H_

#include <stdexcept>
#include <string>

namespace rfdrive {

inline constexpr double kGravity = 9.81;

// Raised when a stepper sees a non-finite state or produces one.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ground-truth physical state. The reference point is the rear axle, so the
// kinematic model keeps v_lat at zero and both models share position
// kinematics.
struct VehicleState {
  double x = 0.0;         // m
  double y = 0.0;         // m
  double yaw = 0.0;       // rad, (-pi, pi]
  double v = 0.0;         // longitudinal speed, m/s
  double v_lat = 0.0;     // lateral speed of the rear axle, m/s
  double yaw_rate = 0.0;  // rad/s
  double delta = 0.0;     // realized steering angle, rad

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct VehicleParams {
  double wheelbase = 0.33;
  double mass = 3.5;
  double yaw_inertia = 0.047;
  double cornering_stiffness_front = 80.0;  // N/rad
  double cornering_stiffness_rear = 95.0;   // N/rad
  double mu = 0.25;
  double v_max = 3.0;
  double delta_max = 0.4189;
  // A time constant of zero means the actuator tracks its command instantly.
  double accel_time_constant = 0.15;
  double steer_time_constant = 0.1;
};

// Commanded speed and steering, a_t = [v_hat, delta_hat].
struct ControlCommand {
  double v = 0.0;
  double delta = 0.0;

  friend bool operator==(const ControlCommand&, const ControlCommand&) =
      default;
};

// Throws std::invalid_argument on out-of-range parameters.
void validate(const VehicleParams& params);

double normalize_yaw(double yaw);

ControlCommand clamp_command(const ControlCommand& cmd,
                             const VehicleParams& params);

// One RK4 step of the kinematic bicycle model with first-order actuator lag.
VehicleState kbm_step(const VehicleState& state, const ControlCommand& cmd,
                      const VehicleParams& params, double dt);

// One RK4 step of the single-track model with linear tires whose lateral
// force saturates at mu*m*g/2 per axle. Below ~0.3 m/s it blends into
// kinematic rolling so the slip angles stay well defined.
VehicleState dynamic_step(const VehicleState& state, const ControlCommand& cmd,
                          const VehicleParams& params, double dt);

bool is_finite(const VehicleState& state);

}  // namespace rfdrive

#endif  // RFDRIVE_VEHICLE_H_
