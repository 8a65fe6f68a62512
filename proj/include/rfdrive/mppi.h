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

// Sampling-based path-integral planner.
//
// A plan is a Gaussian over action sequences: a mean command per horizon
// step and a per-channel std. plan() draws K perturbed sequences around the
// prior mean, scores each rollout, and returns the softmax-weighted average
//
//   w_i = exp((S_i - max_j S_j) / lambda) / sum_k exp((S_k - max_j S_j) / lambda)
//
// as the new mean. Sampling around the previous plan and weighting by
// exp(S / lambda) is what keeps the update close to the prior; no explicit
// KL term is computed.
//
// The rollout kernel is data parallel over samples. Sample i draws its noise
// from its own stream derived from (seed, i) and writes only slot i, so the
// serial and OpenMP kernels produce bit-identical plans.

#ifndef RFDRIVE_MPPI_H_
#define RFDRIVE_MPPI_H_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "rfdrive/lidar.h"
#include "rfdrive/reward.h"
#include "rfdrive/rng.h"
#include "rfdrive/vehicle.h"

namespace rfdrive {

struct MppiConfig {
  int horizon = 10;
  double dt = 0.01;
  int num_samples = 1024;
  double lambda = 0.001;
  ControlCommand noise_std{0.5, 0.15};
  // Fraction of the last mean command kept in the terminal slot on shift.
  double prior_decay = 1.0;
};

void validate(const MppiConfig& config);

struct MppiPlan {
  std::vector<ControlCommand> mean;
  std::vector<ControlCommand> std;
  std::vector<double> weights;
  double predicted_return = 0.0;

  // Set when every sampled rollout collided on its first step.
  bool infeasible() const {
    return predicted_return == -std::numeric_limits<double>::infinity();
  }
};

MppiPlan init_plan(const MppiConfig& config);
MppiPlan shift_prior(const MppiPlan& plan, const MppiConfig& config);
ControlCommand sample_action(const MppiPlan& plan, const VehicleParams& params,
                             std::mt19937_64& rng);

// Normalized exp((s - max) / lambda).
std::vector<double> softmax_weights(std::span<const double> scores,
                                    double lambda);

struct RolloutScore {
  double score = 0.0;
  bool immediate_collision = false;
};

template <class S>
concept RolloutScorer = requires(const S& s,
                                 std::span<const ControlCommand> seq) {
  { s.score(seq) } -> std::same_as<RolloutScore>;
};

enum class Execution { kSerial, kParallel };

// Workspace filled by the sampling kernel: K x T clamped sequences
// (row-major by sample) and K scores.
struct SampleBatch {
  int num_samples = 0;
  int horizon = 0;
  std::vector<ControlCommand> controls;
  std::vector<double> scores;
  std::vector<char> immediate_collision;

  std::span<const ControlCommand> sequence(int k) const {
    return {controls.data() + static_cast<std::size_t>(k) * horizon,
            static_cast<std::size_t>(horizon)};
  }
};

namespace detail {

template <RolloutScorer S>
void sample_one(const S& scorer, const MppiPlan& prior,
                const VehicleParams& bounds, std::uint64_t seed, int k,
                SampleBatch& batch) {
  SplitMixEngine engine(derive_seed(seed, static_cast<std::uint64_t>(k)));
  std::normal_distribution<double> normal(0.0, 1.0);
  const int T = batch.horizon;
  ControlCommand* seq = batch.controls.data() + static_cast<std::size_t>(k) * T;
  for (int t = 0; t < T; ++t) {
    const double nv = normal(engine);
    const double nd = normal(engine);
    seq[t] = clamp_command({prior.mean[t].v + prior.std[t].v * nv,
                            prior.mean[t].delta + prior.std[t].delta * nd},
                           bounds);
  }
  const RolloutScore r = scorer.score({seq, static_cast<std::size_t>(T)});
  batch.scores[k] = r.score;
  batch.immediate_collision[k] = r.immediate_collision;
}

}  // namespace detail

// Reference kernel.
template <RolloutScorer S>
void sample_and_score_serial(const S& scorer, const MppiPlan& prior,
                             const VehicleParams& bounds, std::uint64_t seed,
                             SampleBatch& batch) {
  for (int k = 0; k < batch.num_samples; ++k) {
    detail::sample_one(scorer, prior, bounds, seed, k, batch);
  }
}

template <RolloutScorer S>
void sample_and_score_parallel(const S& scorer, const MppiPlan& prior,
                               const VehicleParams& bounds, std::uint64_t seed,
                               SampleBatch& batch) {
  const int K = batch.num_samples;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < K; ++k) {
    detail::sample_one(scorer, prior, bounds, seed, k, batch);
  }
}

// One planning iteration. `bounds` supplies the clamp box for sampled
// commands. A prior whose horizon differs from the config is replaced by
// init_plan.
template <RolloutScorer S>
MppiPlan plan(const S& scorer, const MppiPlan& prior_in,
              const MppiConfig& config, const VehicleParams& bounds,
              std::uint64_t seed, Execution exec = Execution::kParallel) {
  const MppiPlan prior =
      static_cast<int>(prior_in.mean.size()) == config.horizon
          ? prior_in
          : init_plan(config);
  const int K = config.num_samples;
  const int T = config.horizon;

  SampleBatch batch;
  batch.num_samples = K;
  batch.horizon = T;
  batch.controls.resize(static_cast<std::size_t>(K) * T);
  batch.scores.resize(K);
  batch.immediate_collision.resize(K);
  if (exec == Execution::kParallel) {
    sample_and_score_parallel(scorer, prior, bounds, seed, batch);
  } else {
    sample_and_score_serial(scorer, prior, bounds, seed, batch);
  }

  if (std::all_of(batch.immediate_collision.begin(),
                  batch.immediate_collision.end(),
                  [](char c) { return c != 0; })) {
    MppiPlan out = prior;
    out.predicted_return = -std::numeric_limits<double>::infinity();
    return out;
  }

  MppiPlan out;
  out.weights = softmax_weights(batch.scores, config.lambda);
  out.std = prior.std;
  out.mean.assign(T, ControlCommand{});
  for (int k = 0; k < K; ++k) {
    const double w = out.weights[k];
    if (w == 0.0) continue;
    const auto seq = batch.sequence(k);
    for (int t = 0; t < T; ++t) {
      out.mean[t].v += w * seq[t].v;
      out.mean[t].delta += w * seq[t].delta;
    }
  }
  // Guard the convex combination against rounding past the clamp box.
  for (ControlCommand& c : out.mean) c = clamp_command(c, bounds);
  out.predicted_return = scorer.score(out.mean).score;
  return out;
}

enum class PlannerModel { kKinematic, kDynamic };

// Predicted cumulative driving reward: per horizon step,
// w_v*v - w_c*|v|*collision at the predicted pose.
class DrivingScorer {
 public:
  DrivingScorer(const VehicleState& start, const VehicleParams& params,
                const CollisionProbe& probe, const RewardConfig& reward,
                double dt, PlannerModel model = PlannerModel::kKinematic)
      : start_(start), params_(params), probe_(&probe), reward_(reward),
        dt_(dt), model_(model) {}

  RolloutScore score(std::span<const ControlCommand> seq) const;

 private:
  VehicleState start_;
  VehicleParams params_;
  const CollisionProbe* probe_;
  RewardConfig reward_;
  double dt_;
  PlannerModel model_;
};

struct RecoveryObjective {
  double clearance_target = 0.45;  // m, clearance reward saturates here
  double collision_weight = 1.0;
  double speed_weight = 0.0;
};

// Scores rollouts for the reset phase: reward clearance up to a target,
// penalize predicted contact and, once clear, speed. Never reports
// immediate collision, since recovery starts in contact.
class RecoveryScorer {
 public:
  RecoveryScorer(const VehicleState& start, const VehicleParams& params,
                 const CollisionProbe& probe, const RecoveryObjective& obj,
                 double dt)
      : start_(start), params_(params), probe_(&probe), obj_(obj), dt_(dt) {}

  RolloutScore score(std::span<const ControlCommand> seq) const;

 private:
  VehicleState start_;
  VehicleParams params_;
  const CollisionProbe* probe_;
  RecoveryObjective obj_;
  double dt_;
};

static_assert(RolloutScorer<DrivingScorer>);
static_assert(RolloutScorer<RecoveryScorer>);

}  // namespace rfdrive

#endif  // RFDRIVE_MPPI_H_
