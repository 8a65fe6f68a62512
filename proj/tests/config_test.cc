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


#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rfdrive/config.h"
#include "rfdrive/errors.h"

using namespace rfdrive;

namespace {

const std::filesystem::path kDefault =
    std::filesystem::path(RFDRIVE_SOURCE_DIR) / "configs" / "default.ini";

}  // namespace

TEST_CASE("shipped default config parses to the built-in defaults") {
  const ExperimentConfig c = load_config(kDefault);
  const ExperimentConfig d;
  CHECK(c.agent == "es");
  CHECK(c.episodes == 200);
  CHECK(c.env.vehicle.mu == 0.25);
  CHECK(c.env.vehicle.v_max == 3.0);
  CHECK(c.env.base_mppi.lambda == 0.001);
  CHECK(c.env.base_mppi.horizon == 10);
  CHECK(c.env.base_mppi.dt == 0.01);
  CHECK(c.baseline_mppi.lambda == 0.1);
  CHECK(c.env.reward.gamma == 0.99);
  CHECK(c.env.env.max_steps == 500);
  CHECK(c.env.env.control_dt == 0.02);
  CHECK(c.env.lidar.num_beams == 18);
  CHECK(physical_digest_text(c) == physical_digest_text(d));
}

TEST_CASE("empty text gives defaults") {
  const ExperimentConfig c = parse_config("");
  CHECK(c.agent == "zero");
  CHECK(config_digest(c) == config_digest(ExperimentConfig{}));
}

TEST_CASE("values are applied") {
  const ExperimentConfig c = parse_config(R"(
[experiment]
agent = random
episodes = 7
seed = 42
[env]
w_b = 0
planner_model = dynamic
[mppi.base]
num_samples = 16
[es]
hidden = 32, 8
population = 4
[track]
r_in = 1.0
r_out = 3.0
vertices = 32
)");
  CHECK(c.agent == "random");
  CHECK(c.episodes == 7);
  CHECK(c.seed == 42u);
  CHECK(c.env.env.w_b == 0.0);
  CHECK(c.env.env.planner_model == PlannerModel::kDynamic);
  CHECK(c.env.base_mppi.num_samples == 16);
  CHECK(c.es.hidden == std::vector<int>{32, 8});
  CHECK(c.es.population == 4);
  CHECK(c.env.track.outer.size() == 32u);
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(parse_config("[vehicle]\nmu_typo = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mu = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[vehicle]\nmu = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[vehicle]\nmu = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nplanner_model = magic\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nagent = sac\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nepisodes = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[es]\npopulation = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[es]\nhidden = 8,,8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mppi.base]\nlambda = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[track]\nr_in = 3\nr_out = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[vehicle\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/rfdrive.ini"), ConfigError);
}

TEST_CASE("track file resolves relative to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "rfdrive_config_test";
  std::filesystem::create_directories(dir / "tracks");
  {
    std::ofstream t(dir / "tracks" / "square.txt");
    t << "-3 -3\n3 -3\n3 3\n-3 3\n\n-1 -1\n1 -1\n1 1\n-1 1\n";
    std::ofstream c(dir / "exp.ini");
    c << "[track]\nfile = tracks/square.txt\n";
  }
  const ExperimentConfig c = load_config(dir / "exp.ini");
  CHECK(c.env.track.outer.size() == 4u);
  CHECK(c.env.track.inner.size() == 4u);
  std::filesystem::remove_all(dir);
}

TEST_CASE("digest ignores seeds, agent and output settings") {
  ExperimentConfig a;
  ExperimentConfig b = a;
  b.seed = 99;
  b.agent = "es";
  b.out_dir = "elsewhere";
  b.es.population = 16;
  CHECK(config_digest(a) == config_digest(b));
  b.env.vehicle.mu = 1.0;
  CHECK(config_digest(a) != config_digest(b));
  ExperimentConfig c = a;
  c.env.env.w_b = 0.0;
  CHECK(config_digest(a) != config_digest(c));
}
