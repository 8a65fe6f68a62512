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

#include "rfdrive/env.h"

#include <cmath>

#include "rfdrive/errors.h"
#include "rfdrive/rng.h"

namespace rfdrive {
namespace {

NormalizationBounds bounds_for(const EnvSettings& s) {
  NormalizationBounds b;
  b.delta = s.vehicle.delta_max;
  b.max_range = s.lidar.max_range;
  b.action_v = s.vehicle.v_max;
  b.action_delta = s.vehicle.delta_max;
  return b;
}

}  // namespace

const char* to_string(Mode mode) {
  return mode == Mode::kForward ? "FORWARD" : "RESETTING";
}

Mode mode_from_string(const std::string& s) {
  if (s == "FORWARD") return Mode::kForward;
  if (s == "RESETTING") return Mode::kResetting;
  throw std::invalid_argument("unknown mode: " + s);
}

void validate(const EnvSettings& s, std::string* warning) {
  validate(s.vehicle);
  validate_track(s.track);
  validate(s.lidar);
  validate(s.footprint);
  validate(s.base_mppi);
  validate(s.reward);
  const EnvConfig& e = s.env;
  if (!(e.w_b >= 0.0 && e.w_b <= 1.0)) {
    throw ConfigError("env.w_b must be in [0, 1]");
  }
  if (e.w_b != 0.0 && e.w_b != 1.0 && warning) {
    *warning = "env.w_b outside {0, 1}; residual weight is interpolated";
  }
  if (e.max_steps < 1) throw ConfigError("env.max_steps must be >= 1");
  if (!(e.control_dt > 0.0)) throw ConfigError("env.control_dt must be > 0");
  if (e.substeps < 1) throw ConfigError("env.substeps must be >= 1");
  if (!(e.restart_clearance >= 0.0) || !(e.restart_speed >= 0.0) ||
      e.restart_quiet_steps < 0 || e.reset_timeout_steps < 1) {
    throw ConfigError("invalid env restart settings");
  }
}

void validate(const RewardConfig& c) {
  if (!(c.w_v >= 0.0) || !(c.w_c >= 0.0)) {
    throw ConfigError("reward weights must be >= 0");
  }
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) {
    throw ConfigError("reward.gamma must be in [0, 1)");
  }
}

double EpisodeRecord::episode_return() const {
  double total = 0.0;
  for (const StepRecord& r : steps) {
    if (r.kind == "step") total += r.reward;
  }
  return total;
}

ResetFreeEnv::ResetFreeEnv(EnvSettings settings, std::uint64_t seed)
    : settings_(std::move(settings)),
      builder_(bounds_for(settings_)),
      plan_seeds_(derive_seed(seed, "mppi")),
      action_rng_(derive_seed(seed, "base_action")),
      noise_rng_(derive_seed(seed, "sensor_noise")) {
  validate(settings_);
  probe_ = std::make_unique<CollisionProbe>(
      settings_.track, settings_.lidar, settings_.footprint,
      std::max(0.6, settings_.recovery.escape.clearance_target));
  const Pose2& spawn = settings_.track.spawn;
  VehicleState s;
  s.x = spawn.x;
  s.y = spawn.y;
  s.yaw = normalize_yaw(spawn.yaw);
  place(s, settings_.env.restart_quiet_steps);
}

int ResetFreeEnv::observation_dim() const {
  return rfdrive::observation_dim(settings_.lidar.num_beams);
}

void ResetFreeEnv::place(const VehicleState& state, int quiet_steps) {
  state_ = state;
  sense();
  quiet_steps_ = quiet_steps;
  active_ = false;
  terminated_ = false;
  truncated_ = false;
}

void ResetFreeEnv::respawn() {
  const Pose2& spawn = settings_.track.spawn;
  VehicleState s;
  s.x = spawn.x;
  s.y = spawn.y;
  s.yaw = normalize_yaw(spawn.yaw);
  place(s, settings_.env.restart_quiet_steps);
}

void ResetFreeEnv::sense() {
  scan_ = raycast({state_.x, state_.y, state_.yaw}, settings_.track,
                  settings_.lidar);
  add_uniform_noise(scan_, settings_.lidar.noise_amplitude, noise_rng_);
  collision_ = collision_indicator(scan_, settings_.footprint);
}

void ResetFreeEnv::integrate(const ControlCommand& applied) {
  const int n = settings_.env.substeps;
  const double h = settings_.env.control_dt / n;
  for (int i = 0; i < n; ++i) {
    VehicleState next = dynamic_step(state_, applied, settings_.vehicle, h);
    // Bumper contact: a substep that would push the body into a wall is
    // rejected and the vehicle stops where it was.
    if (probe_->footprint_overlaps({next.x, next.y, next.yaw}) &&
        !probe_->footprint_overlaps({state_.x, state_.y, state_.yaw})) {
      VehicleState held = state_;
      held.v = 0.0;
      held.v_lat = 0.0;
      held.yaw_rate = 0.0;
      held.delta = next.delta;
      next = held;
      ++contact_events_;
    }
    state_ = next;
  }
}

ControlCommand ResetFreeEnv::plan_base_action() {
  const DrivingScorer scorer(state_, settings_.vehicle, *probe_,
                             settings_.reward, settings_.base_mppi.dt,
                             settings_.env.planner_model);
  base_plan_ = plan(scorer, base_plan_, settings_.base_mppi, settings_.vehicle,
                    plan_seeds_(), exec_);
  return sample_action(base_plan_, settings_.vehicle, action_rng_);
}

SensorSnapshot ResetFreeEnv::snapshot(double accel,
                                      const ControlCommand& base) const {
  SensorSnapshot s;
  s.v = state_.v;
  s.omega = state_.yaw_rate;
  s.accel = accel;
  s.delta = state_.delta;
  s.ranges = scan_.ranges;
  s.base_action = base;
  return s;
}

Observation ResetFreeEnv::begin_episode() {
  previous_record_ = std::move(record_);
  record_ = {};
  base_plan_ = init_plan(settings_.base_mppi);
  base_action_ = plan_base_action();

  const SensorSnapshot snap = snapshot(0.0, base_action_);
  builder_.bootstrap(snap);
  obs_ = builder_.current();

  StepRecord rec;
  rec.kind = "begin";
  rec.state = state_;
  rec.collision = collision_;
  rec.sensor = snap;
  record_.steps.push_back(std::move(rec));

  active_ = true;
  terminated_ = false;
  truncated_ = false;
  steps_ = 0;
  return obs_;
}

StepOutcome ResetFreeEnv::step(const ControlCommand& forward_action) {
  if (!active_) {
    throw UsageError(terminated_ || truncated_
                         ? "episode is over; call run_reset or begin_episode"
                         : "step called before begin_episode");
  }
  if (!std::isfinite(forward_action.v) || !std::isfinite(forward_action.delta)) {
    throw std::invalid_argument("non-finite forward action");
  }
  const EnvConfig& cfg = settings_.env;
  StepOutcome out;
  out.info.gate = collision_;
  out.info.base_action = base_action_;
  out.info.applied_action = compose_action(forward_action, base_action_,
                                           collision_, cfg.w_b,
                                           settings_.vehicle);
  out.mode = collision_ ? Mode::kResetting : Mode::kForward;

  const double v_old = state_.v;
  integrate(out.info.applied_action);
  sense();
  const double accel = (state_.v - v_old) / cfg.control_dt;
  out.info.collision = collision_;
  out.reward = compute_reward(state_.v, collision_, settings_.reward);
  quiet_steps_ = collision_ ? 0 : quiet_steps_ + 1;

  ++steps_;
  out.terminated = collision_ != 0;
  out.truncated = !out.terminated && steps_ >= cfg.max_steps;
  terminated_ = out.terminated;
  truncated_ = out.truncated;
  active_ = !(terminated_ || truncated_);

  base_plan_ = shift_prior(base_plan_, settings_.base_mppi);
  base_action_ = plan_base_action();
  const SensorSnapshot snap = snapshot(accel, base_action_);
  builder_.push(snap);
  obs_ = builder_.current();
  out.observation = obs_;

  StepRecord rec;
  rec.index = steps_;
  rec.mode = out.mode;
  rec.state = state_;
  rec.action = forward_action;
  rec.base_action = out.info.base_action;
  rec.applied_action = out.info.applied_action;
  rec.reward = out.reward;
  rec.gate = out.info.gate;
  rec.collision = out.info.collision;
  rec.sensor = snap;
  record_.steps.push_back(std::move(rec));
  return out;
}

bool ResetFreeEnv::restartable() const {
  const EnvConfig& cfg = settings_.env;
  return !collision_ && min_range(scan_) >= cfg.restart_clearance &&
         std::abs(state_.v) <= cfg.restart_speed &&
         quiet_steps_ >= cfg.restart_quiet_steps;
}

Observation ResetFreeEnv::run_reset() {
  if (active_) throw UsageError("run_reset during an active episode");
  const EnvConfig& cfg = settings_.env;
  recovery_plan_ = init_plan(settings_.base_mppi);
  int n = 0;
  while (!restartable()) {
    if (n >= cfg.reset_timeout_steps) {
      last_reset_steps_ = n;
      throw ResetTimeout("vehicle not restartable after " +
                             std::to_string(n) + " reset steps",
                         record_);
    }
    const bool clear =
        !collision_ && min_range(scan_) >= cfg.restart_clearance;
    const RecoveryScorer scorer(
        state_, settings_.vehicle, *probe_,
        clear ? settings_.recovery.settle : settings_.recovery.escape,
        settings_.recovery.horizon_dt);
    recovery_plan_ =
        plan(scorer, shift_prior(recovery_plan_, settings_.base_mppi),
             settings_.base_mppi, settings_.vehicle, plan_seeds_(), exec_);
    const ControlCommand base =
        sample_action(recovery_plan_, settings_.vehicle, action_rng_);

    StepRecord rec;
    rec.kind = "reset";
    rec.gate = collision_;
    const double v_old = state_.v;
    integrate(base);
    sense();
    quiet_steps_ = collision_ ? 0 : quiet_steps_ + 1;
    ++n;

    rec.index = n;
    rec.mode = Mode::kResetting;
    rec.state = state_;
    rec.base_action = base;
    rec.applied_action = base;
    rec.collision = collision_;
    rec.sensor = snapshot((state_.v - v_old) / cfg.control_dt, base);
    record_.steps.push_back(std::move(rec));
  }
  last_reset_steps_ = n;
  return begin_episode();
}

}  // namespace rfdrive
