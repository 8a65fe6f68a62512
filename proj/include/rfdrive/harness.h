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


// Experiment runner: the reset-free training loop, the MPPI baseline,
// frozen-policy evaluation, the w_b x agent matrix and trace export.

#ifndef RFDRIVE_HARNESS_H_
#define RFDRIVE_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rfdrive/agent.h"
#include "rfdrive/config.h"

namespace rfdrive {

struct EpisodeRow {
  int episode = 0;
  double episode_return = 0.0;
  int steps = 0;
  int collided = 0;
  int reset_steps = 0;
};

struct RunSummary {
  std::string name;
  std::vector<EpisodeRow> episodes;
  double final_mean = 0.0;  // over the last min(20, n) episodes
  double final_std = 0.0;
  double wall_clock_s = 0.0;
  int reset_timeouts = 0;
  std::uint64_t config_digest = 0;
};

inline constexpr int kFinalWindow = 20;

// Recomputes final_mean/final_std from the rows.
void aggregate(RunSummary& summary);

struct RunOptions {
  bool write_outputs = true;  // CSV, records, summary under out_dir
  bool write_records = true;
  Execution execution = Execution::kParallel;
  std::function<void(const EpisodeRow&)> on_episode;
};

// Builds the agent named by config.agent; "external" is rejected.
std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, int obs_dim);

// Runs config.episodes reset-free episodes with `agent`. Learner updates
// happen between episodes, before the recovery drive.
RunSummary run_episodes(const ExperimentConfig& config, Agent& agent,
                        const std::string& name, const RunOptions& options);

RunSummary run_training(const ExperimentConfig& config,
                        const RunOptions& options = {});
// Zero forward policy, w_b = 1, planner with the baseline MPPI settings.
RunSummary run_baseline(const ExperimentConfig& config,
                        const RunOptions& options = {});
RunSummary evaluate_policy(const ExperimentConfig& config,
                           const std::filesystem::path& checkpoint,
                           int episodes, const RunOptions& options = {});
// {zero, es} x {w_b = 0, w_b = 1} plus the baseline, each in its own
// subdirectory of config.out_dir.
std::vector<RunSummary> run_matrix(const ExperimentConfig& config,
                                   const RunOptions& options = {});

std::string episodes_csv(const RunSummary& summary);
std::string summary_json(const RunSummary& summary);

enum class TraceFormat { kCsv, kSvg };

// Reads records/*.jsonl (and track.txt beside or above them) and writes
// traces.csv + track.csv, or traces.svg, into `out_dir`. Returns the files
// written.
std::vector<std::filesystem::path> export_traces(
    const std::filesystem::path& records_dir, TraceFormat format,
    const std::filesystem::path& out_dir);

}  // namespace rfdrive

#endif  // RFDRIVE_HARNESS_H_
