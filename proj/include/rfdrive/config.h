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


// Experiment configuration from INI text. Sections mirror the module
// configs; every key is optional, unknown sections or keys are errors.

#ifndef RFDRIVE_CONFIG_H_
#define RFDRIVE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "rfdrive/agent.h"
#include "rfdrive/env.h"
#include "rfdrive/mppi.h"

namespace rfdrive {

struct ExperimentConfig {
  std::string agent = "zero";  // zero | random | es | external
  int episodes = 200;
  std::uint64_t seed = 0;
  std::string out_dir = "runs/default";
  EnvSettings env;
  MppiConfig baseline_mppi{10, 0.01, 1024, 0.1, {0.5, 0.15}, 1.0};
  EsConfig es;
};

void validate(const ExperimentConfig& config, std::string* warning = nullptr);

ExperimentConfig parse_config(const std::string& text);
// Relative track files resolve against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical text of the physical setup (vehicle, track, sensor, reward,
// environment and planners), excluding seeds, agent and output settings.
std::string physical_digest_text(const ExperimentConfig& config);
std::uint64_t config_digest(const ExperimentConfig& config);

}  // namespace rfdrive

#endif  // RFDRIVE_CONFIG_H_
