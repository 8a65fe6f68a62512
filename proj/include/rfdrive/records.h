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


// Line-delimited JSON episode logs. Doubles are written in shortest
// round-trip form, so read_record(write_record(r)) == r bit for bit.

#ifndef RFDRIVE_RECORDS_H_
#define RFDRIVE_RECORDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfdrive/env.h"
#include "rfdrive/observation.h"

namespace rfdrive {

std::string step_record_to_json(const StepRecord& record);
StepRecord step_record_from_json(const std::string& line);

void write_record(std::ostream& out, const EpisodeRecord& record);
EpisodeRecord read_record(std::istream& in);

void save_record(const std::filesystem::path& path, const EpisodeRecord& record);
EpisodeRecord load_record(const std::filesystem::path& path);

// Observations seen by the learner: the one after the "begin" line and the
// one after every "step" line, rebuilt from the logged snapshots alone.
std::vector<Observation> replay_observations(const EpisodeRecord& record,
                                             const NormalizationBounds& bounds);

}  // namespace rfdrive

#endif  // RFDRIVE_RECORDS_H_
