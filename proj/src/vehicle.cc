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

#include "rfdrive/vehicle.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rfdrive/errors.h"

namespace rfdrive {
namespace {

// Blend window (m/s) between kinematic rolling and tire-force dynamics.
constexpr double kBlendLow = 0.3;
constexpr double kBlendHigh = 0.6;
// Relaxation of lateral states toward kinematic rolling at low speed.
constexpr double kRelaxTime = 0.02;

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& x, double a, const Vec<N>& k) {
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + a * k[i];
  return out;
}

template <std::size_t N, class F>
Vec<N> rk4(const Vec<N>& x, double dt, F&& f) {
  const Vec<N> k1 = f(x);
  const Vec<N> k2 = f(axpy(x, 0.5 * dt, k1));
  const Vec<N> k3 = f(axpy(x, 0.5 * dt, k2));
  const Vec<N> k4 = f(axpy(x, dt, k3));
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

double lag_rate(double target, double current, double tau) {
  return tau > 0.0 ? (target - current) / tau : 0.0;
}

void check_inputs(const VehicleState& state, const ControlCommand& cmd,
                  double dt) {
  if (!is_finite(state)) {
    throw SimulationError("non-finite vehicle state");
  }
  if (!std::isfinite(cmd.v) || !std::isfinite(cmd.delta)) {
    throw SimulationError("non-finite control command");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step size must be positive");
  }
}

// Zero time constants snap the actuator to its command before integrating.
VehicleState apply_instant_actuators(VehicleState s, const ControlCommand& c,
                                     const VehicleParams& p) {
  if (p.accel_time_constant <= 0.0) s.v = c.v;
  if (p.steer_time_constant <= 0.0) s.delta = c.delta;
  return s;
}

double blend_weight(double speed) {
  const double s =
      std::clamp((std::abs(speed) - kBlendLow) / (kBlendHigh - kBlendLow),
                 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

}  // namespace

void validate(const VehicleParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("vehicle.") + name +
                                  " must be positive");
    }
  };
  positive(p.wheelbase, "wheelbase");
  positive(p.mass, "mass");
  positive(p.yaw_inertia, "yaw_inertia");
  positive(p.cornering_stiffness_front, "cornering_stiffness_front");
  positive(p.cornering_stiffness_rear, "cornering_stiffness_rear");
  positive(p.delta_max, "delta_max");
  if (!(p.mu > 0.0 && p.mu <= 2.0)) {
    throw ConfigError("vehicle.mu must be in (0, 2]");
  }
  // v_max == 0 and zero lag constants are accepted as degenerate settings.
  if (!(p.v_max >= 0.0) || !std::isfinite(p.v_max)) {
    throw ConfigError("vehicle.v_max must be non-negative");
  }
  if (!(p.accel_time_constant >= 0.0) || !(p.steer_time_constant >= 0.0)) {
    throw ConfigError("actuator time constants must be >= 0");
  }
}

double normalize_yaw(double yaw) {
  constexpr double kPi = std::numbers::pi;
  if (yaw > -kPi && yaw <= kPi) return yaw;
  double r = std::remainder(yaw, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

ControlCommand clamp_command(const ControlCommand& cmd,
                             const VehicleParams& params) {
  return {std::clamp(cmd.v, -params.v_max, params.v_max),
          std::clamp(cmd.delta, -params.delta_max, params.delta_max)};
}

bool is_finite(const VehicleState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.yaw) &&
         std::isfinite(s.v) && std::isfinite(s.v_lat) &&
         std::isfinite(s.yaw_rate) && std::isfinite(s.delta);
}

VehicleState kbm_step(const VehicleState& state, const ControlCommand& cmd,
                      const VehicleParams& params, double dt) {
  check_inputs(state, cmd, dt);
  const ControlCommand c = clamp_command(cmd, params);
  const VehicleState s0 = apply_instant_actuators(state, c, params);
  const double inv_l = 1.0 / params.wheelbase;

  // [x, y, yaw, v, delta]
  const Vec<5> x0{s0.x, s0.y, s0.yaw, s0.v, s0.delta};
  const Vec<5> x1 = rk4(x0, dt, [&](const Vec<5>& x) {
    return Vec<5>{x[3] * std::cos(x[2]), x[3] * std::sin(x[2]),
                  x[3] * std::tan(x[4]) * inv_l,
                  lag_rate(c.v, x[3], params.accel_time_constant),
                  lag_rate(c.delta, x[4], params.steer_time_constant)};
  });

  VehicleState out;
  out.x = x1[0];
  out.y = x1[1];
  out.yaw = normalize_yaw(x1[2]);
  out.v = x1[3];
  out.v_lat = 0.0;
  out.delta = x1[4];
  out.yaw_rate = out.v * std::tan(out.delta) * inv_l;
  if (!is_finite(out)) throw SimulationError("kbm_step diverged");
  return out;
}

VehicleState dynamic_step(const VehicleState& state, const ControlCommand& cmd,
                          const VehicleParams& params, double dt) {
  check_inputs(state, cmd, dt);
  const ControlCommand c = clamp_command(cmd, params);
  const VehicleState s0 = apply_instant_actuators(state, c, params);

  const double l = params.wheelbase;
  const double lf = 0.5 * l;
  const double lr = 0.5 * l;
  const double m = params.mass;
  const double iz = params.yaw_inertia;
  const double f_max = 0.5 * params.mu * m * kGravity;

  // [x, y, yaw, v, v_lat, yaw_rate, delta]
  const Vec<7> x0{s0.x, s0.y, s0.yaw, s0.v, s0.v_lat, s0.yaw_rate, s0.delta};
  const Vec<7> x1 = rk4(x0, dt, [&](const Vec<7>& x) {
    const double yaw = x[2], v = x[3], v_lat = x[4], r = x[5], d = x[6];
    const double v_dot = lag_rate(c.v, v, params.accel_time_constant);
    const double d_dot = lag_rate(c.delta, d, params.steer_time_constant);
    const double cd = std::cos(d), sd = std::sin(d);

    Vec<7> f;
    f[0] = v * std::cos(yaw) - v_lat * std::sin(yaw);
    f[1] = v * std::sin(yaw) + v_lat * std::cos(yaw);
    f[2] = r;
    f[3] = v_dot;
    f[6] = d_dot;

    const double w = blend_weight(v);
    double v_lat_dot = 0.0, r_dot = 0.0;
    if (w > 0.0) {
      // Tire slip in each wheel frame, normalized by |forward speed| so that
      // reversing keeps the force opposing lateral slip.
      const double v_cg_lat = v_lat + lr * r;
      const double vf_lat = v_cg_lat + lf * r;
      const double vwx = v * cd + vf_lat * sd;
      const double vwy = -v * sd + vf_lat * cd;
      const double alpha_f = -std::atan2(vwy, std::abs(vwx));
      const double alpha_r = -std::atan2(v_lat, std::abs(v));
      const double fy_f = std::clamp(
          params.cornering_stiffness_front * alpha_f, -f_max, f_max);
      const double fy_r = std::clamp(
          params.cornering_stiffness_rear * alpha_r, -f_max, f_max);
      const double r_dyn = (lf * fy_f * cd - lr * fy_r) / iz;
      const double v_cg_lat_dot = (fy_f * cd + fy_r) / m - v * r;
      v_lat_dot += w * (v_cg_lat_dot - lr * r_dyn);
      r_dot += w * r_dyn;
    }
    if (w < 1.0) {
      const double td = std::tan(d);
      const double r_kin = v * td / l;
      const double r_kin_dot = (v_dot * td + v * d_dot * (1.0 + td * td)) / l +
                               (r_kin - r) / kRelaxTime;
      v_lat_dot += (1.0 - w) * (-v_lat / kRelaxTime);
      r_dot += (1.0 - w) * r_kin_dot;
    }
    f[4] = v_lat_dot;
    f[5] = r_dot;
    return f;
  });

  VehicleState out;
  out.x = x1[0];
  out.y = x1[1];
  out.yaw = normalize_yaw(x1[2]);
  out.v = x1[3];
  out.v_lat = x1[4];
  out.yaw_rate = x1[5];
  out.delta = x1[6];
  if (!is_finite(out)) throw SimulationError("dynamic_step diverged");
  return out;
}

}  // namespace rfdrive
