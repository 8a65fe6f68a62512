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

#include "rfdrive/mppi.h"

#include <stdexcept>

#include "rfdrive/errors.h"

namespace rfdrive {

void validate(const MppiConfig& c) {
  if (c.horizon < 1) throw ConfigError("mppi.horizon must be >= 1");
  if (c.num_samples < 1) throw ConfigError("mppi.num_samples must be >= 1");
  if (!(c.lambda > 0.0)) throw ConfigError("mppi.lambda must be > 0");
  if (!(c.dt > 0.0)) throw ConfigError("mppi.dt must be > 0");
  if (!(c.noise_std.v > 0.0) || !(c.noise_std.delta > 0.0)) {
    throw ConfigError("mppi noise std must be > 0 per channel");
  }
  if (!(c.prior_decay >= 0.0 && c.prior_decay <= 1.0)) {
    throw ConfigError("mppi.prior_decay must be in [0, 1]");
  }
}

MppiPlan init_plan(const MppiConfig& config) {
  MppiPlan p;
  p.mean.assign(config.horizon, ControlCommand{});
  p.std.assign(config.horizon, config.noise_std);
  p.weights.assign(config.num_samples, 1.0 / config.num_samples);
  return p;
}

MppiPlan shift_prior(const MppiPlan& plan, const MppiConfig& config) {
  if (plan.mean.empty()) return init_plan(config);
  MppiPlan out;
  out.mean.assign(plan.mean.begin() + 1, plan.mean.end());
  const ControlCommand& last = plan.mean.back();
  out.mean.push_back(
      {config.prior_decay * last.v, config.prior_decay * last.delta});
  out.std.assign(plan.mean.size(), config.noise_std);
  out.weights.assign(config.num_samples, 1.0 / config.num_samples);
  return out;
}

ControlCommand sample_action(const MppiPlan& plan, const VehicleParams& params,
                             std::mt19937_64& rng) {
  if (plan.mean.empty()) throw UsageError("sample_action on an empty plan");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double nv = normal(rng);
  const double nd = normal(rng);
  return clamp_command({plan.mean[0].v + plan.std[0].v * nv,
                        plan.mean[0].delta + plan.std[0].delta * nd},
                       params);
}

std::vector<double> softmax_weights(std::span<const double> scores,
                                    double lambda) {
  if (scores.empty()) return {};
  double best = -std::numeric_limits<double>::infinity();
  for (const double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("NaN rollout score");
    best = std::max(best, s);
  }
  std::vector<double> w(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp((scores[i] - best) / lambda);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

RolloutScore DrivingScorer::score(std::span<const ControlCommand> seq) const {
  RolloutScore out;
  VehicleState s = start_;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    s = model_ == PlannerModel::kKinematic
            ? kbm_step(s, seq[t], params_, dt_)
            : dynamic_step(s, seq[t], params_, dt_);
    const int hit = probe_->collides({s.x, s.y, s.yaw}) ? 1 : 0;
    if (t == 0) out.immediate_collision = hit != 0;
    out.score += compute_reward(s.v, hit, reward_);
  }
  return out;
}

RolloutScore RecoveryScorer::score(std::span<const ControlCommand> seq) const {
  RolloutScore out;
  VehicleState s = start_;
  for (const ControlCommand& c : seq) {
    s = kbm_step(s, c, params_, dt_);
    const double clear =
        std::min(probe_->clearance({s.x, s.y}), obj_.clearance_target);
    const double hit = probe_->collides({s.x, s.y, s.yaw}) ? 1.0 : 0.0;
    out.score += clear - obj_.collision_weight * hit -
                 obj_.speed_weight * std::abs(s.v);
  }
  return out;
}

}  // namespace rfdrive
