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

// Reset-free driving environment.
//
// The MPPI base policy lives inside the environment. Every observation
// carries the base action planned for the current state; step() composes
// it with the learner's action, simulates one control period and scores
// the speed reached at the end of it. A collision terminates the episode;
// run_reset() then drives with the base policy alone until the vehicle is
// restartable, without emitting rewards.

#ifndef RFDRIVE_ENV_H_
#define RFDRIVE_ENV_H_

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfdrive/lidar.h"
#include "rfdrive/mppi.h"
#include "rfdrive/observation.h"
#include "rfdrive/reward.h"
#include "rfdrive/track.h"
#include "rfdrive/vehicle.h"

namespace rfdrive {

enum class Mode { kForward, kResetting };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct EnvConfig {
  double w_b = 1.0;
  int max_steps = 500;
  double control_dt = 0.02;
  int substeps = 4;
  double restart_clearance = 0.4;
  double restart_speed = 0.1;
  int restart_quiet_steps = 10;
  int reset_timeout_steps = 1500;
  PlannerModel planner_model = PlannerModel::kKinematic;
};

// Objectives the base planner switches between while resetting: `escape`
// until the scan shows restart clearance, `settle` afterwards.
// The reset planner reuses the base sampler settings but steps its horizon
// at `horizon_dt`, long enough to see past the actuator lag.
struct RecoveryTuning {
  RecoveryObjective escape{0.45, 1.0, 0.01};
  RecoveryObjective settle{0.45, 1.0, 0.5};
  double horizon_dt = 0.05;
};

struct EnvSettings {
  VehicleParams vehicle;
  TrackGeometry track = make_annulus(1.5, 2.5, 64);
  LidarConfig lidar;
  Footprint footprint;
  MppiConfig base_mppi;
  RewardConfig reward;
  EnvConfig env;
  RecoveryTuning recovery;
};

// Throws ConfigError/std::invalid_argument on invalid settings. A residual
// weight outside {0, 1} is accepted; `warning` receives a note about it.
void validate(const EnvSettings& settings, std::string* warning = nullptr);

struct StepInfo {
  ControlCommand base_action;
  ControlCommand applied_action;
  int gate = 0;       // collision flag that selected the applied action
  int collision = 0;  // collision flag after the step
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  Mode mode = Mode::kForward;
  StepInfo info;
};

// One line of the replay log. kind "begin" holds the bootstrap snapshot of
// an episode, "step" one learner-visible control step, "reset" one step of
// run_reset (never shown to the learner).
struct StepRecord {
  std::string kind = "step";
  int index = 0;
  Mode mode = Mode::kForward;
  VehicleState state;  // after the step
  ControlCommand action;
  ControlCommand base_action;
  ControlCommand applied_action;
  double reward = 0.0;
  int gate = 0;
  int collision = 0;
  SensorSnapshot sensor;  // slot pushed into the observation

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeRecord {
  std::vector<StepRecord> steps;

  // Sum of "step" rewards, in log order.
  double episode_return() const;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

class ResetTimeout : public std::runtime_error {
 public:
  ResetTimeout(const std::string& what, EpisodeRecord record)
      : std::runtime_error(what), record_(std::move(record)) {}
  const EpisodeRecord& record() const { return record_; }

 private:
  EpisodeRecord record_;
};

class ResetFreeEnv {
 public:
  ResetFreeEnv(EnvSettings settings, std::uint64_t seed);

  Observation begin_episode();
  StepOutcome step(const ControlCommand& forward_action);
  // Drives with the base policy until the restartable predicate holds, then
  // begins the next episode and returns its first observation.
  Observation run_reset();
  // Last-resort recovery: teleports to the spawn pose at rest.
  void respawn();

  bool restartable() const;
  bool episode_active() const { return active_; }
  bool terminated() const { return terminated_; }
  bool truncated() const { return truncated_; }
  int episode_steps() const { return steps_; }
  int last_reset_steps() const { return last_reset_steps_; }
  int contact_events() const { return contact_events_; }

  const VehicleState& state() const { return state_; }
  const LidarScan& scan() const { return scan_; }
  int collision() const { return collision_; }
  const Observation& observation() const { return obs_; }
  const EpisodeRecord& record() const { return record_; }
  const EpisodeRecord& previous_record() const { return previous_record_; }
  const EnvSettings& settings() const { return settings_; }
  const CollisionProbe& probe() const { return *probe_; }
  const MppiPlan& base_plan() const { return base_plan_; }
  int observation_dim() const;

  // Places the vehicle, outside of any episode. Resets the quiet counter as
  // if the vehicle had been at rest; used by tests and the reset harness.
  void place(const VehicleState& state, int quiet_steps);

  void set_execution(Execution exec) { exec_ = exec; }

 private:
  void sense();
  void integrate(const ControlCommand& applied);
  ControlCommand plan_base_action();
  SensorSnapshot snapshot(double accel, const ControlCommand& base) const;

  EnvSettings settings_;
  std::unique_ptr<CollisionProbe> probe_;
  ObservationBuilder builder_;
  std::mt19937_64 plan_seeds_;
  std::mt19937_64 action_rng_;
  std::mt19937_64 noise_rng_;
  Execution exec_ = Execution::kParallel;

  VehicleState state_;
  LidarScan scan_;
  int collision_ = 0;
  int quiet_steps_ = 0;
  MppiPlan base_plan_;
  MppiPlan recovery_plan_;
  ControlCommand base_action_;
  Observation obs_;

  bool active_ = false;
  bool terminated_ = false;
  bool truncated_ = false;
  int steps_ = 0;
  int last_reset_steps_ = 0;
  int contact_events_ = 0;
  EpisodeRecord record_;
  EpisodeRecord previous_record_;
};

}  // namespace rfdrive

#endif  // RFDRIVE_ENV_H_
