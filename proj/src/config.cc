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


#include "rfdrive/config.h"

#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "rfdrive/errors.h"
#include "rfdrive/rng.h"

namespace rfdrive {
namespace {

using Setter = std::function<void(const std::string&)>;
using Section = std::map<std::string, Setter>;

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(text);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  }
}

template <class T>
Setter setter_for(const std::string& key, T& field) {
  return [key, &field](const std::string& v) { field = parse_value<T>(key, v); };
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty entry in " + key);
    out.push_back(parse_value<int>(key, item.substr(b, e - b + 1)));
  }
  return out;
}

struct TrackSpec {
  double r_in = 1.5;
  double r_out = 2.5;
  int vertices = 64;
  std::string file;
};

Section mppi_section(const std::string& name, MppiConfig& c) {
  return {{"horizon", setter_for(name + ".horizon", c.horizon)},
          {"dt", setter_for(name + ".dt", c.dt)},
          {"num_samples", setter_for(name + ".num_samples", c.num_samples)},
          {"lambda", setter_for(name + ".lambda", c.lambda)},
          {"noise_std_v", setter_for(name + ".noise_std_v", c.noise_std.v)},
          {"noise_std_delta", setter_for(name + ".noise_std_delta", c.noise_std.delta)},
          {"prior_decay", setter_for(name + ".prior_decay", c.prior_decay)}};
}

ExperimentConfig parse_tree(const boost::property_tree::ptree& tree,
                            const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  TrackSpec track;
  std::string planner_model = "kinematic";
  VehicleParams& veh = c.env.vehicle;
  LidarConfig& lidar = c.env.lidar;
  Footprint& fp = c.env.footprint;
  EnvConfig& env = c.env.env;
  RecoveryTuning& rec = c.env.recovery;

  std::map<std::string, Section> sections;
  sections["experiment"] = {
      {"agent", setter_for("experiment.agent", c.agent)},
      {"episodes", setter_for("experiment.episodes", c.episodes)},
      {"seed", setter_for("experiment.seed", c.seed)},
      {"out_dir", setter_for("experiment.out_dir", c.out_dir)}};
  sections["vehicle"] = {
      {"wheelbase", setter_for("vehicle.wheelbase", veh.wheelbase)},
      {"mass", setter_for("vehicle.mass", veh.mass)},
      {"yaw_inertia", setter_for("vehicle.yaw_inertia", veh.yaw_inertia)},
      {"cornering_stiffness_front",
       setter_for("vehicle.cornering_stiffness_front", veh.cornering_stiffness_front)},
      {"cornering_stiffness_rear",
       setter_for("vehicle.cornering_stiffness_rear", veh.cornering_stiffness_rear)},
      {"mu", setter_for("vehicle.mu", veh.mu)},
      {"v_max", setter_for("vehicle.v_max", veh.v_max)},
      {"delta_max", setter_for("vehicle.delta_max", veh.delta_max)},
      {"accel_time_constant",
       setter_for("vehicle.accel_time_constant", veh.accel_time_constant)},
      {"steer_time_constant",
       setter_for("vehicle.steer_time_constant", veh.steer_time_constant)}};
  sections["track"] = {{"r_in", setter_for("track.r_in", track.r_in)},
                       {"r_out", setter_for("track.r_out", track.r_out)},
                       {"vertices", setter_for("track.vertices", track.vertices)},
                       {"file", setter_for("track.file", track.file)}};
  sections["lidar"] = {
      {"fov", setter_for("lidar.fov", lidar.fov)},
      {"max_range", setter_for("lidar.max_range", lidar.max_range)},
      {"num_beams", setter_for("lidar.num_beams", lidar.num_beams)},
      {"dense_beams", setter_for("lidar.dense_beams", lidar.dense_beams)},
      {"noise_amplitude", setter_for("lidar.noise_amplitude", lidar.noise_amplitude)}};
  sections["footprint"] = {
      {"length", setter_for("footprint.length", fp.length)},
      {"width", setter_for("footprint.width", fp.width)},
      {"collision_margin", setter_for("footprint.collision_margin", fp.collision_margin)}};
  sections["reward"] = {{"w_v", setter_for("reward.w_v", c.env.reward.w_v)},
                        {"w_c", setter_for("reward.w_c", c.env.reward.w_c)},
                        {"gamma", setter_for("reward.gamma", c.env.reward.gamma)}};
  sections["env"] = {
      {"w_b", setter_for("env.w_b", env.w_b)},
      {"max_steps", setter_for("env.max_steps", env.max_steps)},
      {"control_dt", setter_for("env.control_dt", env.control_dt)},
      {"substeps", setter_for("env.substeps", env.substeps)},
      {"restart_clearance", setter_for("env.restart_clearance", env.restart_clearance)},
      {"restart_speed", setter_for("env.restart_speed", env.restart_speed)},
      {"restart_quiet_steps",
       setter_for("env.restart_quiet_steps", env.restart_quiet_steps)},
      {"reset_timeout_steps",
       setter_for("env.reset_timeout_steps", env.reset_timeout_steps)},
      {"planner_model", setter_for("env.planner_model", planner_model)}};
  sections["reset"] = {
      {"horizon_dt", setter_for("reset.horizon_dt", rec.horizon_dt)},
      {"clearance_target", [&](const std::string& v) {
         const double x = parse_value<double>("reset.clearance_target", v);
         rec.escape.clearance_target = x;
         rec.settle.clearance_target = x;
       }},
      {"collision_weight", [&](const std::string& v) {
         const double x = parse_value<double>("reset.collision_weight", v);
         rec.escape.collision_weight = x;
         rec.settle.collision_weight = x;
       }},
      {"escape_speed_weight",
       setter_for("reset.escape_speed_weight", rec.escape.speed_weight)},
      {"settle_speed_weight",
       setter_for("reset.settle_speed_weight", rec.settle.speed_weight)}};
  sections["mppi.base"] = mppi_section("mppi.base", c.env.base_mppi);
  sections["mppi.baseline"] = mppi_section("mppi.baseline", c.baseline_mppi);
  sections["es"] = {
      {"population", setter_for("es.population", c.es.population)},
      {"noise_sigma", setter_for("es.noise_sigma", c.es.noise_sigma)},
      {"learning_rate", setter_for("es.learning_rate", c.es.learning_rate)},
      {"episodes_per_eval", setter_for("es.episodes_per_eval", c.es.episodes_per_eval)},
      {"hidden", [&](const std::string& v) {
         c.es.hidden = parse_int_list("es.hidden", v);
       }}};

  for (const auto& [name, body] : tree) {
    if (!body.data().empty()) {
      throw ConfigError("key '" + name + "' outside of a section");
    }
    const auto sec = sections.find(name);
    if (sec == sections.end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, value] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        throw ConfigError("unknown key '" + key + "' in [" + name + "]");
      }
      setter->second(value.data());
    }
  }

  if (planner_model == "kinematic") {
    env.planner_model = PlannerModel::kKinematic;
  } else if (planner_model == "dynamic") {
    env.planner_model = PlannerModel::kDynamic;
  } else {
    throw ConfigError("env.planner_model must be kinematic or dynamic");
  }
  if (!track.file.empty()) {
    std::filesystem::path p(track.file);
    if (p.is_relative()) p = base_dir / p;
    c.env.track = load_track_file(p.string());
  } else {
    c.env.track = make_annulus(track.r_in, track.r_out, track.vertices);
  }
  validate(c);
  return c;
}

boost::property_tree::ptree read_tree(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return tree;
}

}  // namespace

void validate(const ExperimentConfig& c, std::string* warning) {
  if (c.agent != "zero" && c.agent != "random" && c.agent != "es" &&
      c.agent != "external") {
    throw ConfigError("experiment.agent must be zero, random, es or external");
  }
  if (c.episodes < 1) throw ConfigError("experiment.episodes must be >= 1");
  validate(c.env, warning);
  validate(c.baseline_mppi);
  validate(c.es);
}

ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_tree(read_tree(in), std::filesystem::current_path());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_tree(read_tree(in), path.parent_path());
}

std::string physical_digest_text(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto num = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << '=' << buf << '\n';
  };
  const VehicleParams& v = c.env.vehicle;
  num("wheelbase", v.wheelbase);
  num("mass", v.mass);
  num("yaw_inertia", v.yaw_inertia);
  num("cf", v.cornering_stiffness_front);
  num("cr", v.cornering_stiffness_rear);
  num("mu", v.mu);
  num("v_max", v.v_max);
  num("delta_max", v.delta_max);
  num("accel_tau", v.accel_time_constant);
  num("steer_tau", v.steer_time_constant);
  std::ostringstream track;
  write_track(track, c.env.track);
  out << "track=" << fnv1a(track.str()) << '\n';
  const LidarConfig& l = c.env.lidar;
  num("fov", l.fov);
  num("max_range", l.max_range);
  num("num_beams", l.num_beams);
  num("dense_beams", l.dense_beams);
  num("noise", l.noise_amplitude);
  num("fp_length", c.env.footprint.length);
  num("fp_width", c.env.footprint.width);
  num("fp_margin", c.env.footprint.collision_margin);
  num("w_v", c.env.reward.w_v);
  num("w_c", c.env.reward.w_c);
  num("gamma", c.env.reward.gamma);
  const EnvConfig& e = c.env.env;
  num("w_b", e.w_b);
  num("max_steps", e.max_steps);
  num("control_dt", e.control_dt);
  num("substeps", e.substeps);
  num("restart_clearance", e.restart_clearance);
  num("restart_speed", e.restart_speed);
  num("restart_quiet", e.restart_quiet_steps);
  num("reset_timeout", e.reset_timeout_steps);
  num("planner_model", static_cast<int>(e.planner_model));
  const RecoveryTuning& r = c.env.recovery;
  num("reset_dt", r.horizon_dt);
  num("reset_target", r.escape.clearance_target);
  num("reset_collision", r.escape.collision_weight);
  num("reset_escape_speed", r.escape.speed_weight);
  num("reset_settle_speed", r.settle.speed_weight);
  for (const auto* m : {&c.env.base_mppi, &c.baseline_mppi}) {
    num("mppi.horizon", m->horizon);
    num("mppi.dt", m->dt);
    num("mppi.K", m->num_samples);
    num("mppi.lambda", m->lambda);
    num("mppi.std_v", m->noise_std.v);
    num("mppi.std_delta", m->noise_std.delta);
    num("mppi.decay", m->prior_decay);
  }
  return out.str();
}

std::uint64_t config_digest(const ExperimentConfig& c) {
  return fnv1a(physical_digest_text(c));
}

}  // namespace rfdrive
