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
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "rfdrive/agent.h"
#include "rfdrive/errors.h"

using namespace rfdrive;

namespace {

Observation random_obs(std::uint64_t seed, int dim = 96) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Observation o;
  o.num_beams = 18;
  o.values.resize(dim);
  for (double& x : o.values) x = u(rng);
  return o;
}

}  // namespace

TEST_CASE("zero agent") {
  ZeroAgent a;
  for (int i = 0; i < 10; ++i) {
    CHECK(a.act(random_obs(i)).action == ControlCommand{0.0, 0.0});
  }
}

TEST_CASE("random agent stays in the unit box and is seeded") {
  RandomAgent a(4), b(4);
  const Observation o = random_obs(1);
  for (int i = 0; i < 1000; ++i) {
    const ControlCommand x = a.act(o).action;
    CHECK(x == b.act(o).action);
    CHECK(std::abs(x.v) <= 1.0);
    CHECK(std::abs(x.delta) <= 1.0);
  }
}

TEST_CASE("action scaling") {
  VehicleParams p;
  CHECK(denormalize_action({1.0, -1.0}, p) == ControlCommand{p.v_max, -p.delta_max});
  CHECK(denormalize_action({5.0, 0.0}, p).v == p.v_max);
  CHECK(denormalize_action({0.0, 0.0}, p) == ControlCommand{});
  CHECK(normalize_action({p.v_max, -p.delta_max}, p) == ControlCommand{1.0, -1.0});
  p.v_max = 0.0;
  CHECK(normalize_action({1.0, 0.0}, p).v == 0.0);
}

TEST_CASE("policy net") {
  const PolicyNet net({96, 64, 64, 2});
  CHECK(net.num_params() == 96u * 64 + 64 + 64u * 64 + 64 + 64u * 2 + 2);

  SUBCASE("zero parameters act as zero") {
    const std::vector<double> zero(net.num_params(), 0.0);
    const auto y = net.forward(random_obs(3).values, zero);
    CHECK(y == std::vector<double>{0.0, 0.0});
  }

  SUBCASE("matches a hand-rolled forward pass") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 0.3);
    std::vector<double> theta(net.num_params());
    for (double& t : theta) t = n(rng);
    const Observation obs = random_obs(9);

    std::vector<double> x = obs.values;
    std::size_t off = 0;
    const std::vector<int> sizes{96, 64, 64, 2};
    for (std::size_t l = 1; l < sizes.size(); ++l) {
      const int in = sizes[l - 1], out = sizes[l];
      const std::vector<double> w(theta.begin() + off, theta.begin() + off + in * out);
      off += in * out;
      const std::vector<double> b(theta.begin() + off, theta.begin() + off + out);
      off += out;
      x = oracle::dense_tanh(x, w, b, out);
    }
    const auto y = net.forward(obs.values, theta);
    REQUIRE(y.size() == 2);
    CHECK(std::abs(y[0] - x[0]) < 1e-6);
    CHECK(std::abs(y[1] - x[1]) < 1e-6);
    CHECK(std::abs(y[0]) < 1.0);
  }

  SUBCASE("initial parameters give a zero action") {
    const auto theta = net.initial_params(5);
    CHECK(net.forward(random_obs(2).values, theta) == std::vector<double>{0.0, 0.0});
    CHECK(theta == net.initial_params(5));
    CHECK(theta != net.initial_params(6));
  }

  SUBCASE("bad shapes") {
    CHECK_THROWS(PolicyNet({96}));
    CHECK_THROWS(PolicyNet({96, 0, 2}));
    CHECK_THROWS(net.forward(std::vector<double>(95, 0.0),
                             std::vector<double>(net.num_params(), 0.0)));
  }
}

TEST_CASE("centered ranks") {
  const std::vector<double> v{3.0, 1.0, 2.0};
  CHECK(centered_ranks(v) == std::vector<double>{0.5, -0.5, 0.0});
  const std::vector<double> tie{1.0, 1.0, 1.0, 1.0};
  CHECK(centered_ranks(tie) == std::vector<double>(4, 0.0));
  const std::vector<double> partial{5.0, 1.0, 5.0};
  CHECK(centered_ranks(partial) == std::vector<double>{0.25, -0.5, 0.25});
}

TEST_CASE("es_update examples") {
  EsConfig c;
  c.population = 2;
  c.noise_sigma = 0.1;
  c.learning_rate = 0.01;

  SUBCASE("equal returns leave theta unchanged") {
    std::vector<double> theta{0.3, -0.2, 1.0};
    const std::vector<double> before = theta;
    const std::vector<EsEvaluation> ev{{7, 1, 2.0}, {7, -1, 2.0}};
    es_update(theta, ev, c);
    CHECK(theta == before);
  }

  SUBCASE("antithetic pair moves along the better direction") {
    std::vector<double> theta(5, 0.0);
    const std::vector<EsEvaluation> ev{{7, 1, 1.0}, {7, -1, 0.0}};
    es_update(theta, ev, c);
    const auto eps = es_noise(7, 5);
    // ranks +0.5 / -0.5: step = lr / (2 sigma) * (0.5 eps + 0.5 eps)
    for (int j = 0; j < 5; ++j) {
      CHECK(theta[j] == doctest::Approx(c.learning_rate / (2 * c.noise_sigma) * eps[j]));
      CHECK(theta[j] * eps[j] > 0.0);
    }
  }
}

TEST_CASE("es on a two-parameter quadratic bandit") {
  EsConfig c;
  c.population = 8;
  c.noise_sigma = 0.05;
  c.learning_rate = 0.005;
  const double opt[2] = {0.5, -0.3};
  const auto f = [&](const std::vector<double>& t) {
    return -((t[0] - opt[0]) * (t[0] - opt[0]) + (t[1] - opt[1]) * (t[1] - opt[1]));
  };
  std::vector<double> theta{0.0, 0.0};
  std::mt19937_64 seeds(1);
  for (int it = 0; it < 200; ++it) {
    std::vector<EsEvaluation> ev;
    for (int k = 0; k < c.population / 2; ++k) {
      const std::uint64_t s = seeds();
      const auto eps = es_noise(s, 2);
      for (const int sign : {1, -1}) {
        std::vector<double> t = theta;
        for (int j = 0; j < 2; ++j) t[j] += sign * c.noise_sigma * eps[j];
        ev.push_back({s, sign, f(t)});
      }
    }
    es_update(theta, ev, c);
  }
  CHECK(std::hypot(theta[0] - opt[0], theta[1] - opt[1]) < 0.05);
}

TEST_CASE("es agent") {
  EsConfig c;
  c.seed = 12;
  c.hidden = {8};
  c.population = 4;
  c.episodes_per_eval = 2;

  SUBCASE("parameter trajectory is deterministic") {
    EsAgent a(96, c), b(96, c);
    for (int ep = 0; ep < 24; ++ep) {
      const Observation o = random_obs(ep);
      const auto xa = a.act(o).action;
      CHECK(xa == b.act(o).action);
      a.end_episode(xa.v - xa.delta);
      b.end_episode(xa.v - xa.delta);
    }
    CHECK(a.generation() == 3);
    CHECK(a.theta() == b.theta());
    CHECK(a.theta() != EsAgent(96, c).theta());
  }

  SUBCASE("perturbed members differ, frozen agent uses theta") {
    EsAgent a(96, c);
    std::vector<double> theta(a.net().num_params(), 0.01);
    a.set_theta(theta);
    const Observation o = random_obs(1);
    const auto perturbed = a.act(o).action;
    a.set_frozen(true);
    const auto mean = a.act(o).action;
    CHECK(perturbed != mean);
    const auto direct = a.net().forward(o.values, theta);
    CHECK(mean == ControlCommand{direct[0], direct[1]});
    a.end_episode(1.0);
    CHECK(a.theta() == theta);
  }

  SUBCASE("checkpoint round trip") {
    EsAgent a(96, c);
    for (int ep = 0; ep < 8; ++ep) a.end_episode(static_cast<double>(ep % 3));
    const auto b = EsAgent::from_checkpoint(a.checkpoint_json());
    CHECK(b->theta() == a.theta());
    CHECK(b->generation() == a.generation());
    CHECK(b->net().layers() == a.net().layers());
    CHECK_THROWS_AS(EsAgent::from_checkpoint("{}"), ConfigError);
    CHECK_THROWS_AS(EsAgent::from_checkpoint("not json"), ConfigError);
  }

  SUBCASE("config validation") {
    EsConfig bad = c;
    bad.population = 3;
    CHECK_THROWS(EsAgent(96, bad));
    bad = c;
    bad.noise_sigma = 0.0;
    CHECK_THROWS(EsAgent(96, bad));
  }
}
