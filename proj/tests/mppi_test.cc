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


#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "rfdrive/mppi.h"
#include "rfdrive/track.h"

using namespace rfdrive;

namespace {

// r(a) = -(a - a*)^2 summed over both channels and every horizon step.
struct QuadraticScorer {
  ControlCommand target;
  RolloutScore score(std::span<const ControlCommand> seq) const {
    RolloutScore out;
    for (const ControlCommand& c : seq) {
      out.score -= (c.v - target.v) * (c.v - target.v) +
                   (c.delta - target.delta) * (c.delta - target.delta);
    }
    return out;
  }
};

struct AlwaysCollides {
  RolloutScore score(std::span<const ControlCommand>) const { return {0.0, true}; }
};

double entropy(const std::vector<double>& w) {
  double h = 0.0;
  for (const double x : w) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

}  // namespace

TEST_CASE("quadratic surrogate: plan lands on the regularized optimum") {
  const VehicleParams p;
  MppiConfig cfg;
  cfg.horizon = 1;
  cfg.num_samples = 10000;
  cfg.lambda = 0.1;
  const QuadraticScorer scorer{{0.4, -0.1}};
  const ControlCommand mu0 = init_plan(cfg).mean[0];
  const double opt_v = oracle::tilted_mean(mu0.v, cfg.noise_std.v, cfg.lambda, 1.0, 0.4,
                                           -p.v_max, p.v_max);
  const double opt_d = oracle::tilted_mean(mu0.delta, cfg.noise_std.delta, cfg.lambda, 1.0,
                                           -0.1, -p.delta_max, p.delta_max);
  // unclamped closed form: a* / (1 + lambda / (2 sigma^2))
  CHECK(opt_v == doctest::Approx(0.4 / 1.2).epsilon(1e-6));
  CHECK(opt_d == doctest::Approx(-0.1 / (1.0 + 0.1 / 0.045)).epsilon(2e-2));
  double ev = 0.0, ed = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MppiPlan out = plan(scorer, init_plan(cfg), cfg, p, seed);
    ev += (out.mean[0].v - opt_v) * (out.mean[0].v - opt_v) / 10.0;
    ed += (out.mean[0].delta - opt_d) * (out.mean[0].delta - opt_d) / 10.0;
  }
  CHECK(std::sqrt(ev) < 2.0 * cfg.noise_std.v / std::sqrt(cfg.num_samples));
  CHECK(std::sqrt(ed) < 2.0 * cfg.noise_std.delta / std::sqrt(cfg.num_samples));
}

TEST_CASE("single sample becomes the mean") {
  const VehicleParams p;
  MppiConfig cfg;
  cfg.num_samples = 1;
  const QuadraticScorer scorer{{1.0, 0.1}};
  const MppiPlan prior = init_plan(cfg);
  const MppiPlan out = plan(scorer, prior, cfg, p, 42, Execution::kSerial);
  SampleBatch batch;
  batch.num_samples = 1;
  batch.horizon = cfg.horizon;
  batch.controls.resize(cfg.horizon);
  batch.scores.resize(1);
  batch.immediate_collision.resize(1);
  sample_and_score_serial(scorer, prior, p, 42, batch);
  CHECK(out.weights == std::vector<double>{1.0});
  for (int t = 0; t < cfg.horizon; ++t) CHECK(out.mean[t] == batch.controls[t]);
}

TEST_CASE("softmax weights") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> s(1000);
  for (double& x : s) x = u(rng);

  SUBCASE("sum to one") {
    for (const double lambda : {1e-3, 0.1, 1.0, 100.0}) {
      const auto w = softmax_weights(s, lambda);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      CHECK(std::abs(total - 1.0) < 1e-9);
      for (const double x : w) CHECK(x >= 0.0);
    }
  }
  SUBCASE("high temperature is uniform") {
    const auto w = softmax_weights(s, 1e6);
    for (const double x : w) CHECK(std::abs(x - 1.0 / s.size()) < 1e-6);
  }
  SUBCASE("shift invariance is bit exact") {
    // Dyadic scores and shifts keep every subtraction exact.
    std::uniform_int_distribution<int> k(-4096, 4096);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> a(64), b(64);
      const double c = k(rng) * 0.25;
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = k(rng) / 1024.0;
        b[i] = a[i] + c;
      }
      CHECK(softmax_weights(a, 0.1) == softmax_weights(b, 0.1));
    }
  }
  SUBCASE("entropy grows with temperature") {
    double prev = -1.0;
    for (const double lambda : {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
      const double h = entropy(softmax_weights(s, lambda));
      CHECK(h >= prev - 1e-12);
      prev = h;
    }
  }
  SUBCASE("nan is rejected") {
    std::vector<double> bad{0.0, std::nan("")};
    CHECK_THROWS(softmax_weights(bad, 1.0));
  }
}

TEST_CASE("shift_prior") {
  MppiConfig cfg;
  cfg.horizon = 4;
  MppiPlan p = init_plan(cfg);
  p.mean = {{1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.4}};
  cfg.prior_decay = 0.0;
  MppiPlan s = shift_prior(p, cfg);
  CHECK(s.mean == std::vector<ControlCommand>{{2, 0.2}, {3, 0.3}, {4, 0.4}, {0, 0}});
  cfg.prior_decay = 1.0;
  s = shift_prior(p, cfg);
  CHECK(s.mean.back() == p.mean.back());
  cfg.prior_decay = 0.5;
  s = shift_prior(p, cfg);
  CHECK(s.mean.back() == ControlCommand{2.0, 0.2});
  const MppiPlan z = shift_prior(init_plan(cfg), cfg);
  for (const auto& c : z.mean) CHECK(c == ControlCommand{});
  CHECK(s.weights.size() == static_cast<std::size_t>(cfg.num_samples));
}

TEST_CASE("sample_action") {
  const VehicleParams p;
  MppiConfig cfg;
  MppiPlan plan_ = init_plan(cfg);
  std::mt19937_64 rng(9);
  plan_.mean[0] = {1.0, 0.1};
  plan_.std[0] = {0.0, 0.0};
  CHECK(sample_action(plan_, p, rng) == ControlCommand{1.0, 0.1});

  plan_.std[0] = cfg.noise_std;
  const int n = 100000;
  double sv = 0.0, sd = 0.0;
  for (int i = 0; i < n; ++i) {
    const ControlCommand c = sample_action(plan_, p, rng);
    sv += c.v;
    sd += c.delta;
  }
  CHECK(std::abs(sv / n - 1.0) < 4.0 * cfg.noise_std.v / std::sqrt(n));
  CHECK(std::abs(sd / n - 0.1) < 4.0 * cfg.noise_std.delta / std::sqrt(n));

  plan_.mean[0] = {p.v_max, 0.0};
  for (int i = 0; i < 10000; ++i) CHECK(sample_action(plan_, p, rng).v <= p.v_max);
}

TEST_CASE("every rollout colliding on its first step flags the plan") {
  const VehicleParams p;
  MppiConfig cfg;
  cfg.num_samples = 16;
  MppiPlan prior = init_plan(cfg);
  prior.mean[0] = {0.5, 0.0};
  const MppiPlan out = plan(AlwaysCollides{}, prior, cfg, p, 1);
  CHECK(out.infeasible());
  CHECK(out.mean == prior.mean);
}

TEST_CASE("mismatched prior horizon falls back to init_plan") {
  const VehicleParams p;
  MppiConfig cfg;
  cfg.num_samples = 8;
  MppiPlan wrong;
  wrong.mean.assign(3, {2.0, 0.3});
  wrong.std.assign(3, cfg.noise_std);
  const QuadraticScorer scorer{{0.0, 0.0}};
  CHECK(plan(scorer, wrong, cfg, p, 5).mean ==
        plan(scorer, init_plan(cfg), cfg, p, 5).mean);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const VehicleParams p;
  const TrackGeometry t = make_annulus(1.5, 2.5, 64);
  const CollisionProbe probe(t, LidarConfig{}, Footprint{});
  VehicleState s;
  s.x = 2.2;
  s.yaw = 1.2;
  s.v = 2.0;
  const DrivingScorer scorer(s, p, probe, RewardConfig{}, 0.01);
  MppiConfig cfg;
  for (const double lambda : {0.001, 0.1}) {
    cfg.lambda = lambda;
    const MppiPlan a = plan(scorer, init_plan(cfg), cfg, p, 77, Execution::kSerial);
    const MppiPlan b = plan(scorer, init_plan(cfg), cfg, p, 77, Execution::kParallel);
    CHECK(a.mean == b.mean);
    CHECK(a.weights == b.weights);
    CHECK(a.predicted_return == b.predicted_return);
    const MppiPlan c = plan(scorer, init_plan(cfg), cfg, p, 77, Execution::kSerial);
    CHECK(a.mean == c.mean);
  }
}

TEST_CASE("driving scorer prefers speed and avoids walls") {
  const VehicleParams p;
  const TrackGeometry t = make_annulus(1.5, 2.5, 64);
  const CollisionProbe probe(t, LidarConfig{}, Footprint{});
  VehicleState s;
  s.x = 2.0;
  s.yaw = 1.5707963267948966;
  s.v = 1.0;
  const DrivingScorer scorer(s, p, probe, RewardConfig{}, 0.01);
  std::vector<ControlCommand> fast(10, {3.0, 0.0}), slow(10, {0.0, 0.0});
  CHECK(scorer.score(fast).score > scorer.score(slow).score);
  CHECK_FALSE(scorer.score(fast).immediate_collision);

  VehicleState wall = s;
  wall.x = 2.33;  // side of the footprint at the outer wall
  const DrivingScorer near(wall, p, probe, RewardConfig{}, 0.01);
  CHECK(near.score(slow).immediate_collision);
}

TEST_CASE("mppi config validation") {
  MppiConfig c;
  CHECK_NOTHROW(validate(c));
  c.lambda = 0.0;
  CHECK_THROWS(validate(c));
  c = {};
  c.horizon = 0;
  CHECK_THROWS(validate(c));
  c = {};
  c.noise_std.delta = 0.0;
  CHECK_THROWS(validate(c));
  c = {};
  c.prior_decay = 1.5;
  CHECK_THROWS(validate(c));
}
