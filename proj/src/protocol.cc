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


#include "rfdrive/protocol.h"

#include <boost/asio.hpp>
#include <cmath>

#include "json.hpp"
#include "rfdrive/agent.h"

namespace rfdrive {
namespace {

using nlohmann::json;

json command_json(const ControlCommand& c) { return json::array({c.v, c.delta}); }

}  // namespace

std::string error_message(const std::string& code, const std::string& message) {
  return json{{"type", "error"}, {"code", code}, {"message", message}}.dump();
}

std::string ProtocolSession::greeting() const {
  return json{{"type", "hello"},
              {"version", kProtocolVersion},
              {"obs_dim", env_->observation_dim()},
              {"act_dim", kActionDim}}
      .dump();
}

void ProtocolSession::recover() {
  try {
    env_->run_reset();
  } catch (const ResetTimeout&) {
    ++reset_timeouts_;
    env_->respawn();
    env_->begin_episode();
  }
  recovered_ = true;
}

std::string ProtocolSession::start_episode() {
  if (recovered_) {
    // run_reset already began the next episode.
    recovered_ = false;
  } else if (env_->terminated()) {
    recover();
    recovered_ = false;
  } else {
    env_->begin_episode();
  }
  state_ = State::kStepping;
  return json{{"type", "obs"}, {"obs", env_->observation().values}}.dump();
}

std::string ProtocolSession::handle(const std::string& line) {
  json msg;
  try {
    msg = json::parse(line);
  } catch (const json::exception&) {
    return error_message("malformed", "not a JSON object");
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return error_message("malformed", "missing string field 'type'");
  }
  const std::string type = msg["type"].get<std::string>();

  if (type == "hello") {
    if (state_ != State::kAwaitHello) {
      return error_message("protocol_order", "hello already exchanged");
    }
    if (!msg.contains("version") || !msg["version"].is_number_integer()) {
      return error_message("malformed", "hello needs integer 'version'");
    }
    if (msg["version"].get<int>() != kProtocolVersion) {
      return error_message("version_mismatch",
                           "server speaks version " +
                               std::to_string(kProtocolVersion));
    }
    state_ = State::kIdle;
    return greeting();
  }
  if (type == "reset_req") {
    if (state_ == State::kAwaitHello || state_ == State::kClosed) {
      return error_message("protocol_order", "reset_req before hello");
    }
    return start_episode();
  }
  if (type == "act") {
    if (state_ != State::kStepping) {
      return error_message("protocol_order",
                           state_ == State::kEpisodeOver
                               ? "episode over; send reset_req"
                               : "act before reset_req");
    }
    const auto it = msg.find("action");
    if (it == msg.end() || !it->is_array() || it->size() != kActionDim ||
        !(*it)[0].is_number() || !(*it)[1].is_number()) {
      return error_message("malformed", "act needs 'action': [number, number]");
    }
    const ControlCommand a{(*it)[0].get<double>(), (*it)[1].get<double>()};
    if (!std::isfinite(a.v) || !std::isfinite(a.delta)) {
      return error_message("malformed", "non-finite action");
    }
    const StepOutcome o =
        env_->step(denormalize_action(a, env_->settings().vehicle));
    if (o.terminated || o.truncated) state_ = State::kEpisodeOver;
    return json{{"type", "step"},
                {"obs", o.observation.values},
                {"reward", o.reward},
                {"terminated", o.terminated},
                {"truncated", o.truncated},
                {"mode", to_string(o.mode)},
                {"info",
                 {{"base_action", command_json(o.info.base_action)},
                  {"applied_action", command_json(o.info.applied_action)},
                  {"collision", o.info.collision},
                  {"gate", o.info.gate}}}}
        .dump();
  }
  if (type == "close") {
    state_ = State::kClosed;
    return json{{"type", "bye"}}.dump();
  }
  return error_message("unknown_type", "unknown message type '" + type + "'");
}

void ProtocolSession::disconnect() {
  if (env_->terminated() && !recovered_) recover();
  state_ = State::kAwaitHello;
}

void serve(ResetFreeEnv& env, const std::string& host, std::uint16_t port,
           const ServeOptions& options) {
  namespace asio = boost::asio;
  using asio::ip::tcp;
  asio::io_context io;
  tcp::acceptor acceptor(io, tcp::endpoint(asio::ip::make_address(host), port));
  if (options.on_listening) options.on_listening(acceptor.local_endpoint().port());
  const auto log = [&](const std::string& s) {
    if (options.log) options.log(s);
  };
  ProtocolSession session(env);
  for (int n = 0; options.max_sessions == 0 || n < options.max_sessions; ++n) {
    tcp::socket socket(io);
    acceptor.accept(socket);
    log("client connected");
    boost::system::error_code ec;
    asio::write(socket, asio::buffer(session.greeting() + "\n"), ec);
    asio::streambuf buf;
    while (!ec) {
      asio::read_until(socket, buf, '\n', ec);
      if (ec) break;
      std::istream in(&buf);
      std::string line;
      std::getline(in, line);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      asio::write(socket, asio::buffer(session.handle(line) + "\n"), ec);
      if (session.closed()) break;
    }
    session.disconnect();
    log("client disconnected");
  }
}

}  // namespace rfdrive
