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


// Forward policies. Agents act in a normalized action space [-1, 1]^2 that
// maps linearly onto [-v_max, v_max] x [-delta_max, delta_max].

#ifndef RFDRIVE_AGENT_H_
#define RFDRIVE_AGENT_H_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rfdrive/observation.h"
#include "rfdrive/vehicle.h"

namespace rfdrive {

struct AgentDecision {
  ControlCommand action;  // normalized
};

// Clips the normalized action to [-1, 1]^2 and scales it to physical units.
ControlCommand denormalize_action(const ControlCommand& normalized,
                                  const VehicleParams& params);
ControlCommand normalize_action(const ControlCommand& physical,
                                const VehicleParams& params);

class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentDecision act(const Observation& obs) = 0;
  // Called once per finished episode with its return; learners update here.
  virtual void end_episode(double /*episode_return*/) {}
  virtual std::string name() const = 0;
};

class ZeroAgent : public Agent {
 public:
  AgentDecision act(const Observation&) override { return {}; }
  std::string name() const override { return "zero"; }
};

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  AgentDecision act(const Observation& obs) override;
  std::string name() const override { return "random"; }

 private:
  std::mt19937_64 rng_;
};

// Replays a fixed list of physical commands, then zeros.
class ReplayAgent : public Agent {
 public:
  ReplayAgent(std::vector<ControlCommand> commands, const VehicleParams& params)
      : commands_(std::move(commands)), params_(params) {}
  AgentDecision act(const Observation& obs) override;
  std::string name() const override { return "replay"; }

 private:
  std::vector<ControlCommand> commands_;
  VehicleParams params_;
  std::size_t next_ = 0;
};

// Fully connected tanh network; the last layer is tanh-bounded too.
class PolicyNet {
 public:
  explicit PolicyNet(std::vector<int> layers);

  const std::vector<int>& layers() const { return layers_; }
  std::size_t num_params() const { return num_params_; }

  // Per layer: weights row-major [out][in], then biases.
  std::vector<double> forward(std::span<const double> input,
                              std::span<const double> params) const;

  // Scaled-uniform hidden weights, zero biases, zero output layer.
  std::vector<double> initial_params(std::uint64_t seed) const;

 private:
  std::vector<int> layers_;
  std::size_t num_params_ = 0;
};

struct EsConfig {
  int population = 2;
  double noise_sigma = 0.1;
  double learning_rate = 0.02;
  int episodes_per_eval = 1;
  std::uint64_t seed = 0;
  std::vector<int> hidden{64, 64};
};

void validate(const EsConfig& config);

// One evaluated perturbation: theta + sign * sigma * eps(seed).
struct EsEvaluation {
  std::uint64_t seed = 0;
  int sign = 1;
  double mean_return = 0.0;
};

std::vector<double> es_noise(std::uint64_t seed, std::size_t n);

// Ranks mapped to [-0.5, 0.5]; ties share the average rank.
std::vector<double> centered_ranks(std::span<const double> values);

// theta += lr / (P * sigma) * sum_i rank_i * sign_i * eps_i
void es_update(std::vector<double>& theta,
               std::span<const EsEvaluation> evaluations,
               const EsConfig& config);

// Evolution strategies learner. Each generation evaluates population/2
// antithetic pairs, one perturbation per episodes_per_eval episodes, and
// updates after the last one. With `frozen` set it always acts with theta.
class EsAgent : public Agent {
 public:
  EsAgent(int obs_dim, const EsConfig& config);

  AgentDecision act(const Observation& obs) override;
  void end_episode(double episode_return) override;
  std::string name() const override { return "es"; }

  void set_frozen(bool frozen) { frozen_ = frozen; }
  const std::vector<double>& theta() const { return theta_; }
  void set_theta(std::vector<double> theta);
  const PolicyNet& net() const { return net_; }
  const EsConfig& config() const { return config_; }
  int generation() const { return generation_; }

  std::string checkpoint_json() const;
  static std::unique_ptr<EsAgent> from_checkpoint(const std::string& json);

 private:
  void start_generation();
  void load_member();

  EsConfig config_;
  PolicyNet net_;
  std::vector<double> theta_;
  std::vector<double> acting_;
  std::mt19937_64 seed_stream_;
  std::vector<std::uint64_t> pair_seeds_;
  std::vector<EsEvaluation> evaluations_;
  int member_ = 0;
  int member_episodes_ = 0;
  double member_return_ = 0.0;
  int generation_ = 0;
  bool frozen_ = false;
};

}  // namespace rfdrive

#endif  // RFDRIVE_AGENT_H_
