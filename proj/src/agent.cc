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


#include "rfdrive/agent.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rfdrive/errors.h"
#include "rfdrive/rng.h"

namespace rfdrive {

ControlCommand denormalize_action(const ControlCommand& a,
                                  const VehicleParams& params) {
  return {std::clamp(a.v, -1.0, 1.0) * params.v_max,
          std::clamp(a.delta, -1.0, 1.0) * params.delta_max};
}

ControlCommand normalize_action(const ControlCommand& c,
                                const VehicleParams& params) {
  const auto ratio = [](double x, double scale) {
    return scale > 0.0 ? std::clamp(x / scale, -1.0, 1.0) : 0.0;
  };
  return {ratio(c.v, params.v_max), ratio(c.delta, params.delta_max)};
}

AgentDecision RandomAgent::act(const Observation&) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AgentDecision d;
  d.action.v = u(rng_);
  d.action.delta = u(rng_);
  return d;
}

AgentDecision ReplayAgent::act(const Observation&) {
  if (next_ >= commands_.size()) return {};
  return {normalize_action(commands_[next_++], params_)};
}

PolicyNet::PolicyNet(std::vector<int> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2) throw ConfigError("policy needs >= 2 layer sizes");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l] < 1) throw ConfigError("policy layer sizes must be >= 1");
    if (l > 0) {
      num_params_ += static_cast<std::size_t>(layers_[l]) * (layers_[l - 1] + 1);
    }
  }
}

std::vector<double> PolicyNet::forward(std::span<const double> input,
                                       std::span<const double> params) const {
  if (static_cast<int>(input.size()) != layers_.front()) {
    throw std::invalid_argument("policy input size mismatch");
  }
  if (params.size() != num_params_) {
    throw std::invalid_argument("policy parameter count mismatch");
  }
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> y;
  const double* p = params.data();
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    const int in = layers_[l - 1];
    const int out = layers_[l];
    const double* w = p;
    const double* b = p + static_cast<std::size_t>(out) * in;
    y.assign(out, 0.0);
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * x[i];
      y[o] = std::tanh(acc);
    }
    p = b + out;
    x.swap(y);
  }
  return x;
}

std::vector<double> PolicyNet::initial_params(std::uint64_t seed) const {
  std::vector<double> params(num_params_, 0.0);
  SplitMixEngine engine(seed);
  std::size_t offset = 0;
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    const int in = layers_[l - 1];
    const int out = layers_[l];
    const std::size_t nw = static_cast<std::size_t>(out) * in;
    if (l + 1 < layers_.size()) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double scale = 1.0 / std::sqrt(static_cast<double>(in));
      for (std::size_t i = 0; i < nw; ++i) params[offset + i] = scale * u(engine);
    }
    offset += nw + out;
  }
  return params;
}

void validate(const EsConfig& c) {
  if (c.population < 2 || c.population % 2 != 0) {
    throw ConfigError("es.population must be even and >= 2");
  }
  if (!(c.noise_sigma > 0.0) || !(c.learning_rate > 0.0)) {
    throw ConfigError("es.noise_sigma and es.learning_rate must be > 0");
  }
  if (c.episodes_per_eval < 1) {
    throw ConfigError("es.episodes_per_eval must be >= 1");
  }
  for (const int h : c.hidden) {
    if (h < 1) throw ConfigError("es.hidden sizes must be >= 1");
  }
}

std::vector<double> es_noise(std::uint64_t seed, std::size_t n) {
  SplitMixEngine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> eps(n);
  for (double& e : eps) e = normal(engine);
  return eps;
}

std::vector<double> centered_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) {
      out[order[k]] = rank / static_cast<double>(n - 1) - 0.5;
    }
    i = j + 1;
  }
  return out;
}

void es_update(std::vector<double>& theta,
               std::span<const EsEvaluation> evaluations,
               const EsConfig& config) {
  if (evaluations.empty()) return;
  std::vector<double> returns;
  returns.reserve(evaluations.size());
  for (const EsEvaluation& e : evaluations) returns.push_back(e.mean_return);
  const std::vector<double> ranks = centered_ranks(returns);
  std::vector<double> step(theta.size(), 0.0);
  for (std::size_t i = 0; i < evaluations.size(); ++i) {
    if (ranks[i] == 0.0) continue;
    const std::vector<double> eps = es_noise(evaluations[i].seed, theta.size());
    const double c = ranks[i] * evaluations[i].sign;
    for (std::size_t j = 0; j < theta.size(); ++j) step[j] += c * eps[j];
  }
  const double scale = config.learning_rate /
                       (static_cast<double>(evaluations.size()) * config.noise_sigma);
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] += scale * step[j];
}

namespace {

std::vector<int> layer_sizes(int obs_dim, const std::vector<int>& hidden) {
  std::vector<int> layers{obs_dim};
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(2);
  return layers;
}

}  // namespace

EsAgent::EsAgent(int obs_dim, const EsConfig& config)
    : config_(config),
      net_(layer_sizes(obs_dim, config.hidden)),
      seed_stream_(derive_seed(config.seed, "es_perturbation")) {
  validate(config_);
  theta_ = net_.initial_params(derive_seed(config.seed, "agent_init"));
  start_generation();
}

void EsAgent::set_theta(std::vector<double> theta) {
  if (theta.size() != net_.num_params()) {
    throw std::invalid_argument("parameter count mismatch");
  }
  theta_ = std::move(theta);
  load_member();
}

void EsAgent::start_generation() {
  pair_seeds_.clear();
  for (int i = 0; i < config_.population / 2; ++i) {
    pair_seeds_.push_back(seed_stream_());
  }
  evaluations_.clear();
  member_ = 0;
  member_episodes_ = 0;
  member_return_ = 0.0;
  load_member();
}

void EsAgent::load_member() {
  acting_ = theta_;
  if (frozen_) return;
  const std::vector<double> eps =
      es_noise(pair_seeds_[member_ / 2], theta_.size());
  const double s = (member_ % 2 == 0 ? 1.0 : -1.0) * config_.noise_sigma;
  for (std::size_t j = 0; j < acting_.size(); ++j) acting_[j] += s * eps[j];
}

AgentDecision EsAgent::act(const Observation& obs) {
  const std::vector<double> out =
      net_.forward(obs.values, frozen_ ? std::span<const double>(theta_)
                                       : std::span<const double>(acting_));
  return {{out[0], out[1]}};
}

void EsAgent::end_episode(double episode_return) {
  if (frozen_) return;
  member_return_ += episode_return;
  if (++member_episodes_ < config_.episodes_per_eval) return;
  EsEvaluation e;
  e.seed = pair_seeds_[member_ / 2];
  e.sign = member_ % 2 == 0 ? 1 : -1;
  e.mean_return = member_return_ / config_.episodes_per_eval;
  evaluations_.push_back(e);
  member_episodes_ = 0;
  member_return_ = 0.0;
  if (++member_ < config_.population) {
    load_member();
    return;
  }
  es_update(theta_, evaluations_, config_);
  ++generation_;
  start_generation();
}

std::string EsAgent::checkpoint_json() const {
  nlohmann::json j;
  j["format"] = "rfdrive-es-checkpoint";
  j["version"] = 1;
  j["layers"] = net_.layers();
  j["generation"] = generation_;
  j["es"] = {{"population", config_.population},
             {"noise_sigma", config_.noise_sigma},
             {"learning_rate", config_.learning_rate},
             {"episodes_per_eval", config_.episodes_per_eval},
             {"seed", config_.seed}};
  j["theta"] = theta_;
  return j.dump(1);
}

std::unique_ptr<EsAgent> EsAgent::from_checkpoint(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "rfdrive-es-checkpoint") {
    throw ConfigError("checkpoint: not an rfdrive ES checkpoint");
  }
  try {
    const auto layers = j.at("layers").get<std::vector<int>>();
    if (layers.size() < 2 || layers.back() != 2) {
      throw ConfigError("checkpoint: bad layer sizes");
    }
    EsConfig c;
    const auto& es = j.at("es");
    c.population = es.at("population").get<int>();
    c.noise_sigma = es.at("noise_sigma").get<double>();
    c.learning_rate = es.at("learning_rate").get<double>();
    c.episodes_per_eval = es.at("episodes_per_eval").get<int>();
    c.seed = es.at("seed").get<std::uint64_t>();
    c.hidden.assign(layers.begin() + 1, layers.end() - 1);
    auto agent = std::make_unique<EsAgent>(layers.front(), c);
    agent->generation_ = j.at("generation").get<int>();
    agent->set_theta(j.at("theta").get<std::vector<double>>());
    agent->set_frozen(true);
    return agent;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace rfdrive
