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


#include "rfdrive/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "rfdrive/errors.h"
#include "rfdrive/records.h"
#include "rfdrive/rng.h"

namespace rfdrive {
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string episode_file(int episode) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "episode_%04d.jsonl", episode);
  return buf;
}

}  // namespace

void aggregate(RunSummary& s) {
  const std::size_t n = s.episodes.size();
  const std::size_t w = std::min<std::size_t>(n, kFinalWindow);
  s.final_mean = 0.0;
  s.final_std = 0.0;
  if (w == 0) return;
  for (std::size_t i = n - w; i < n; ++i) s.final_mean += s.episodes[i].episode_return;
  s.final_mean /= static_cast<double>(w);
  for (std::size_t i = n - w; i < n; ++i) {
    const double d = s.episodes[i].episode_return - s.final_mean;
    s.final_std += d * d;
  }
  s.final_std = std::sqrt(s.final_std / static_cast<double>(w));
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, int obs_dim) {
  if (config.agent == "zero") return std::make_unique<ZeroAgent>();
  if (config.agent == "random") {
    return std::make_unique<RandomAgent>(derive_seed(config.seed, "agent"));
  }
  if (config.agent == "es") {
    EsConfig es = config.es;
    es.seed = derive_seed(config.seed, "es");
    return std::make_unique<EsAgent>(obs_dim, es);
  }
  if (config.agent == "external") {
    throw ConfigError("agent 'external' runs through `serve`, not `train`");
  }
  throw ConfigError("unknown agent '" + config.agent + "'");
}

RunSummary run_episodes(const ExperimentConfig& config, Agent& agent,
                        const std::string& name, const RunOptions& options) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.name = name;
  summary.config_digest = config_digest(config);

  const fs::path out_dir(config.out_dir);
  const fs::path records_dir = out_dir / "records";
  if (options.write_outputs) {
    fs::create_directories(out_dir);
    if (options.write_records) fs::create_directories(records_dir);
    std::ostringstream track;
    write_track(track, config.env.track);
    write_text(out_dir / "track.txt", track.str());
  }

  ResetFreeEnv env(config.env, derive_seed(config.seed, "env"));
  env.set_execution(options.execution);
  const VehicleParams& params = config.env.vehicle;
  Observation obs = env.begin_episode();
  for (int ep = 1; ep <= config.episodes; ++ep) {
    StepOutcome o;
    do {
      const AgentDecision d = agent.act(obs);
      o = env.step(denormalize_action(d.action, params));
      obs = o.observation;
    } while (!o.terminated && !o.truncated);
    const double ret = env.record().episode_return();
    agent.end_episode(ret);

    EpisodeRow row;
    row.episode = ep;
    row.episode_return = ret;
    row.steps = env.episode_steps();
    row.collided = o.terminated ? 1 : 0;
    if (o.terminated) {
      try {
        obs = env.run_reset();
        row.reset_steps = env.last_reset_steps();
      } catch (const ResetTimeout&) {
        ++summary.reset_timeouts;
        row.reset_steps = env.last_reset_steps();
        env.respawn();
        obs = env.begin_episode();
      }
    } else {
      obs = env.begin_episode();
    }

    if (options.write_outputs && options.write_records) {
      save_record(records_dir / episode_file(ep), env.previous_record());
    }
    summary.episodes.push_back(row);
    if (options.on_episode) options.on_episode(row);
  }
  aggregate(summary);
  summary.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (options.write_outputs) {
    write_text(out_dir / "episodes.csv", episodes_csv(summary));
    write_text(out_dir / "summary.json", summary_json(summary));
    if (const auto* es = dynamic_cast<const EsAgent*>(&agent)) {
      write_text(out_dir / "checkpoint.json", es->checkpoint_json());
    }
  }
  return summary;
}

RunSummary run_training(const ExperimentConfig& config, const RunOptions& options) {
  const auto agent = make_agent(config, observation_dim(config.env.lidar.num_beams));
  return run_episodes(config, *agent, "train_" + config.agent, options);
}

RunSummary run_baseline(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig c = config;
  c.agent = "zero";
  c.env.env.w_b = 1.0;
  c.env.base_mppi = config.baseline_mppi;
  ZeroAgent agent;
  return run_episodes(c, agent, "baseline", options);
}

RunSummary evaluate_policy(const ExperimentConfig& config,
                           const fs::path& checkpoint, int episodes,
                           const RunOptions& options) {
  std::ifstream in(checkpoint);
  if (!in) throw ConfigError("cannot read checkpoint " + checkpoint.string());
  std::stringstream text;
  text << in.rdbuf();
  auto agent = EsAgent::from_checkpoint(text.str());
  const int obs_dim = observation_dim(config.env.lidar.num_beams);
  if (agent->net().layers().front() != obs_dim) {
    throw ConfigError("checkpoint input size " +
                      std::to_string(agent->net().layers().front()) +
                      " does not match observation size " +
                      std::to_string(obs_dim));
  }
  ExperimentConfig c = config;
  c.episodes = episodes;
  return run_episodes(c, *agent, "eval", options);
}

std::vector<RunSummary> run_matrix(const ExperimentConfig& config,
                                   const RunOptions& options) {
  std::vector<RunSummary> out;
  for (const char* agent : {"zero", "es"}) {
    for (const double w_b : {0.0, 1.0}) {
      ExperimentConfig c = config;
      c.agent = agent;
      c.env.env.w_b = w_b;
      const std::string name =
          std::string(agent) + (w_b == 0.0 ? "_wb0" : "_wb1");
      c.out_dir = (fs::path(config.out_dir) / name).string();
      const auto a = make_agent(c, observation_dim(c.env.lidar.num_beams));
      out.push_back(run_episodes(c, *a, name, options));
    }
  }
  ExperimentConfig c = config;
  c.out_dir = (fs::path(config.out_dir) / "baseline").string();
  out.push_back(run_baseline(c, options));
  return out;
}

std::string episodes_csv(const RunSummary& s) {
  std::string out = "episode,return,steps,collided,reset_steps\n";
  for (const EpisodeRow& r : s.episodes) {
    out += std::to_string(r.episode) + ',' + fmt17(r.episode_return) + ',' +
           std::to_string(r.steps) + ',' + std::to_string(r.collided) + ',' +
           std::to_string(r.reset_steps) + '\n';
  }
  return out;
}

std::string summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["episodes"] = s.episodes.size();
  j["final_window"] = std::min<std::size_t>(s.episodes.size(), kFinalWindow);
  j["final_mean_return"] = s.final_mean;
  j["final_std_return"] = s.final_std;
  j["wall_clock_s"] = s.wall_clock_s;
  j["reset_timeouts"] = s.reset_timeouts;
  j["config_digest"] = hex64(s.config_digest);
  return j.dump(1) + "\n";
}

namespace {

struct Trace {
  int episode = 0;
  EpisodeRecord record;
};

std::vector<Trace> load_traces(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Trace> out;
  for (const fs::path& f : files) {
    Trace t;
    const std::string stem = f.stem().string();
    const auto pos = stem.find_last_of('_');
    try {
      t.episode = std::stoi(pos == std::string::npos ? stem : stem.substr(pos + 1));
    } catch (const std::exception&) {
      t.episode = static_cast<int>(out.size()) + 1;
    }
    t.record = load_record(f);
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<TrackGeometry> find_track(const fs::path& dir) {
  for (const fs::path& p : {dir / "track.txt", dir.parent_path() / "track.txt"}) {
    if (fs::exists(p)) return load_track_file(p.string());
  }
  return std::nullopt;
}

std::string svg_points(const std::vector<Vec2>& pts, bool closed) {
  std::string out;
  for (const Vec2& p : pts) out += fmt17(p.x) + ',' + fmt17(-p.y) + ' ';
  if (closed && !pts.empty()) out += fmt17(pts[0].x) + ',' + fmt17(-pts[0].y);
  return out;
}

}  // namespace

std::vector<fs::path> export_traces(const fs::path& records_dir,
                                    TraceFormat format, const fs::path& out_dir) {
  if (!fs::is_directory(records_dir)) {
    throw ConfigError("records directory not found: " + records_dir.string());
  }
  const std::vector<Trace> traces = load_traces(records_dir);
  const std::optional<TrackGeometry> track = find_track(records_dir);
  fs::create_directories(out_dir);
  std::vector<fs::path> written;

  if (format == TraceFormat::kCsv) {
    std::string csv = "episode,index,kind,mode,x,y,yaw,v,collision\n";
    for (const Trace& t : traces) {
      for (const StepRecord& r : t.record.steps) {
        csv += std::to_string(t.episode) + ',' + std::to_string(r.index) + ',' +
               r.kind + ',' + to_string(r.mode) + ',' + fmt17(r.state.x) + ',' +
               fmt17(r.state.y) + ',' + fmt17(r.state.yaw) + ',' +
               fmt17(r.state.v) + ',' + std::to_string(r.collision) + '\n';
      }
    }
    write_text(out_dir / "traces.csv", csv);
    written.push_back(out_dir / "traces.csv");
    if (track) {
      std::string tcsv = "boundary,x,y\n";
      for (const Vec2& p : track->outer) {
        tcsv += "outer," + fmt17(p.x) + ',' + fmt17(p.y) + '\n';
      }
      for (const Vec2& p : track->inner) {
        tcsv += "inner," + fmt17(p.x) + ',' + fmt17(p.y) + '\n';
      }
      write_text(out_dir / "track.csv", tcsv);
      written.push_back(out_dir / "track.csv");
    }
    return written;
  }

  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  const auto grow = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  if (track) {
    for (const Vec2& p : track->outer) grow(p.x, p.y);
  }
  for (const Trace& t : traces) {
    for (const StepRecord& r : t.record.steps) grow(r.state.x, r.state.y);
  }
  if (lo_x > hi_x) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
  const double pad = 0.2;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << fmt17(lo_x - pad) << ' ' << fmt17(-hi_y - pad) << ' '
      << fmt17(hi_x - lo_x + 2 * pad) << ' ' << fmt17(hi_y - lo_y + 2 * pad)
      << "\" width=\"800\" height=\"800\">\n";
  if (track) {
    svg << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"0.02\" points=\""
        << svg_points(track->outer, false) << "\"/>\n";
    svg << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"0.02\" points=\""
        << svg_points(track->inner, false) << "\"/>\n";
  }
  const int n = static_cast<int>(traces.size());
  for (int i = 0; i < n; ++i) {
    std::vector<Vec2> drive, reset;
    for (const StepRecord& r : traces[i].record.steps) {
      (r.kind == "reset" ? reset : drive).push_back({r.state.x, r.state.y});
    }
    const int hue = n > 1 ? 240 * i / (n - 1) : 0;
    svg << "<g id=\"episode-" << traces[i].episode << "\">\n";
    if (drive.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"hsl(" << hue
          << ",80%,45%)\" stroke-width=\"0.015\" points=\""
          << svg_points(drive, false) << "\"/>\n";
    }
    if (reset.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"0.03\" "
             "stroke-width=\"0.01\" points=\""
          << svg_points(reset, false) << "\"/>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  write_text(out_dir / "traces.svg", svg.str());
  written.push_back(out_dir / "traces.svg");
  return written;
}

}  // namespace rfdrive
