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


// rfdrive command-line driver.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rfdrive/config.h"
#include "rfdrive/errors.h"
#include "rfdrive/harness.h"
#include "rfdrive/protocol.h"
#include "rfdrive/rng.h"

namespace {

using namespace rfdrive;

void print_summary(const RunSummary& s) {
  std::printf("%s: %zu episodes, final-%d mean return %.3f (std %.3f), "
              "reset timeouts %d, %.1f s\n",
              s.name.c_str(), s.episodes.size(),
              std::min<int>(kFinalWindow, static_cast<int>(s.episodes.size())),
              s.final_mean, s.final_std, s.reset_timeouts, s.wall_clock_s);
}

RunOptions progress_options(bool quiet) {
  RunOptions o;
  if (!quiet) {
    o.on_episode = [](const EpisodeRow& r) {
      std::fprintf(stderr, "episode %d return %.3f steps %d collided %d reset %d\n",
                   r.episode, r.episode_return, r.steps, r.collided, r.reset_steps);
    };
  }
  return o;
}

ExperimentConfig load(const std::string& path) {
  ExperimentConfig c = load_config(path);
  std::string warning;
  validate(c, &warning);
  if (!warning.empty()) std::fprintf(stderr, "warning: %s\n", warning.c_str());
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reset-free driving: MPPI base policy, learners, harness"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "No per-episode progress on stderr");

  std::string config_path, out_dir, checkpoint, addr, records, format;
  std::uint64_t seed = 0;
  int episodes = kFinalWindow;

  auto* train = app.add_subcommand("train", "Reset-free training run");
  train->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  auto* seed_opt = train->add_option("--seed", seed, "Root seed");
  auto* out_opt = train->add_option("--out", out_dir, "Output directory");

  auto* baseline = app.add_subcommand("baseline", "MPPI baseline run");
  baseline->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  auto* bout_opt = baseline->add_option("--out", out_dir, "Output directory");

  auto* matrix = app.add_subcommand("matrix", "{zero, es} x {w_b 0, 1} + baseline");
  matrix->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* serve_cmd = app.add_subcommand("serve", "Expose the environment over TCP");
  serve_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--addr", addr, "host:port")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a frozen ES checkpoint");
  eval->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  eval->add_option("--episodes", episodes, "Evaluation episodes")
      ->check(CLI::PositiveNumber);
  auto* eout_opt = eval->add_option("--out", out_dir, "Output directory");

  auto* exp = app.add_subcommand("export", "Trajectory export from records");
  exp->add_option("--records", records)->required()->check(CLI::ExistingDirectory);
  exp->add_option("--format", format)->required()->check(CLI::IsMember({"csv", "svg"}));
  exp->add_option("--out", out_dir, "Output directory (default: the records dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      ExperimentConfig c = load(config_path);
      if (*seed_opt) c.seed = seed;
      if (*out_opt) c.out_dir = out_dir;
      print_summary(run_training(c, progress_options(quiet)));
    } else if (*baseline) {
      ExperimentConfig c = load(config_path);
      if (*bout_opt) c.out_dir = out_dir;
      print_summary(run_baseline(c, progress_options(quiet)));
    } else if (*matrix) {
      const ExperimentConfig c = load(config_path);
      for (const RunSummary& s : run_matrix(c, progress_options(quiet))) {
        print_summary(s);
      }
    } else if (*eval) {
      ExperimentConfig c = load(config_path);
      if (*eout_opt) c.out_dir = out_dir;
      print_summary(evaluate_policy(c, checkpoint, episodes, progress_options(quiet)));
    } else if (*serve_cmd) {
      const ExperimentConfig c = load(config_path);
      const auto colon = addr.rfind(':');
      if (colon == std::string::npos) throw ConfigError("--addr must be host:port");
      const std::string host = addr.substr(0, colon);
      int port = 0;
      try {
        port = std::stoi(addr.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad port in --addr");
      }
      if (port < 0 || port > 65535) throw ConfigError("bad port in --addr");
      ResetFreeEnv env(c.env, derive_seed(c.seed, "env"));
      ServeOptions opts;
      opts.on_listening = [&](std::uint16_t p) {
        std::printf("listening on %s:%u\n", host.c_str(), p);
        std::fflush(stdout);
      };
      opts.log = [](const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); };
      serve(env, host, static_cast<std::uint16_t>(port), opts);
    } else if (*exp) {
      const auto files = export_traces(
          records, format == "csv" ? TraceFormat::kCsv : TraceFormat::kSvg,
          out_dir.empty() ? std::filesystem::path(records) : std::filesystem::path(out_dir));
      for (const auto& f : files) std::printf("%s\n", f.string().c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
