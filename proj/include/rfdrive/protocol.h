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


// Line-delimited JSON protocol exposing a ResetFreeEnv to an external
// learner. One JSON object per line, each with a "type" field.
//
//   server: {"type":"hello","version":1,"obs_dim":96,"act_dim":2}
//   client: {"type":"hello","version":1}
//   client: {"type":"reset_req"}          -> {"type":"obs","obs":[...]}
//   client: {"type":"act","action":[a,b]} -> {"type":"step","obs":[...],
//           "reward":r,"terminated":b,"truncated":b,"mode":"FORWARD",
//           "info":{"base_action":[..],"applied_action":[..],"collision":c,
//                   "gate":g}}
//   client: {"type":"close"}              -> {"type":"bye"}
//
// Actions are normalized to [-1, 1]^2. Failures answer
// {"type":"error","code":...,"message":...} and keep the connection; codes
// are malformed, protocol_order, version_mismatch and unknown_type.

#ifndef RFDRIVE_PROTOCOL_H_
#define RFDRIVE_PROTOCOL_H_

#include <cstdint>
#include <functional>
#include <string>

#include "rfdrive/env.h"

namespace rfdrive {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kActionDim = 2;

class ProtocolSession {
 public:
  explicit ProtocolSession(ResetFreeEnv& env) : env_(&env) {}

  // First line the server sends on a new connection.
  std::string greeting() const;
  // Handles one request line and returns the response line.
  std::string handle(const std::string& line);
  bool closed() const { return state_ == State::kClosed; }
  // Connection lost: completes a pending reset so the vehicle is restartable
  // for the next client, and rewinds to the greeting state.
  void disconnect();

  int reset_timeouts() const { return reset_timeouts_; }

 private:
  enum class State { kAwaitHello, kIdle, kStepping, kEpisodeOver, kClosed };

  std::string start_episode();
  void recover();

  ResetFreeEnv* env_;
  State state_ = State::kAwaitHello;
  bool recovered_ = false;
  int reset_timeouts_ = 0;
};

std::string error_message(const std::string& code, const std::string& message);

struct ServeOptions {
  // Stop after this many client sessions; 0 serves forever.
  int max_sessions = 0;
  // Receives the bound port once listening (useful with port 0).
  std::function<void(std::uint16_t)> on_listening;
  std::function<void(const std::string&)> log;
};

// Blocking single-client TCP server.
void serve(ResetFreeEnv& env, const std::string& host, std::uint16_t port,
           const ServeOptions& options = {});

}  // namespace rfdrive

#endif  // RFDRIVE_PROTOCOL_H_
