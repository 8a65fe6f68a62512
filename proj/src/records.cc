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


#include "rfdrive/records.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "rfdrive/errors.h"

namespace rfdrive {
namespace {

using nlohmann::json;

json command_json(const ControlCommand& c) { return json::array({c.v, c.delta}); }

ControlCommand command_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("record: bad command");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string step_record_to_json(const StepRecord& r) {
  json j;
  j["kind"] = r.kind;
  j["index"] = r.index;
  j["mode"] = to_string(r.mode);
  const VehicleState& s = r.state;
  j["state"] = {{"x", s.x},         {"y", s.y},
                {"yaw", s.yaw},     {"v", s.v},
                {"v_lat", s.v_lat}, {"yaw_rate", s.yaw_rate},
                {"delta", s.delta}};
  j["action"] = command_json(r.action);
  j["base_action"] = command_json(r.base_action);
  j["applied_action"] = command_json(r.applied_action);
  j["reward"] = r.reward;
  j["gate"] = r.gate;
  j["collision"] = r.collision;
  const SensorSnapshot& z = r.sensor;
  j["sensor"] = {{"v", z.v},
                 {"omega", z.omega},
                 {"accel", z.accel},
                 {"delta", z.delta},
                 {"ranges", z.ranges},
                 {"base_action", command_json(z.base_action)}};
  return j.dump();
}

StepRecord step_record_from_json(const std::string& line) {
  try {
    const json j = json::parse(line);
    StepRecord r;
    r.kind = j.at("kind").get<std::string>();
    if (r.kind != "begin" && r.kind != "step" && r.kind != "reset") {
      throw ConfigError("record: unknown kind " + r.kind);
    }
    r.index = j.at("index").get<int>();
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    const json& s = j.at("state");
    r.state.x = s.at("x").get<double>();
    r.state.y = s.at("y").get<double>();
    r.state.yaw = s.at("yaw").get<double>();
    r.state.v = s.at("v").get<double>();
    r.state.v_lat = s.at("v_lat").get<double>();
    r.state.yaw_rate = s.at("yaw_rate").get<double>();
    r.state.delta = s.at("delta").get<double>();
    r.action = command_from(j.at("action"));
    r.base_action = command_from(j.at("base_action"));
    r.applied_action = command_from(j.at("applied_action"));
    r.reward = j.at("reward").get<double>();
    r.gate = j.at("gate").get<int>();
    r.collision = j.at("collision").get<int>();
    const json& z = j.at("sensor");
    r.sensor.v = z.at("v").get<double>();
    r.sensor.omega = z.at("omega").get<double>();
    r.sensor.accel = z.at("accel").get<double>();
    r.sensor.delta = z.at("delta").get<double>();
    r.sensor.ranges = z.at("ranges").get<std::vector<double>>();
    r.sensor.base_action = command_from(z.at("base_action"));
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("record: ") + e.what());
  }
}

void write_record(std::ostream& out, const EpisodeRecord& record) {
  for (const StepRecord& r : record.steps) out << step_record_to_json(r) << '\n';
}

EpisodeRecord read_record(std::istream& in) {
  EpisodeRecord record;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    record.steps.push_back(step_record_from_json(line));
  }
  return record;
}

void save_record(const std::filesystem::path& path, const EpisodeRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_record(out, record);
}

EpisodeRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_record(in);
}

std::vector<Observation> replay_observations(const EpisodeRecord& record,
                                             const NormalizationBounds& bounds) {
  std::vector<Observation> out;
  ObservationBuilder builder(bounds);
  bool started = false;
  for (const StepRecord& r : record.steps) {
    if (r.kind == "begin") {
      builder.bootstrap(r.sensor);
      started = true;
      out.push_back(builder.current());
    } else if (started && r.kind == "step") {
      builder.push(r.sensor);
      out.push_back(builder.current());
    }
  }
  return out;
}

}  // namespace rfdrive
