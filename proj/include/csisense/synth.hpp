// SPDX-License-Identifier: Apache-2.0
//
// csisense - Wi-Fi channel state information sensing toolkit
// Copyright (C) 2026 The csisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "csisense/csi_model.hpp"
#include "csisense/io.hpp"

namespace csisense {

struct LocationSpec {
  std::string name;
  std::vector<StaticPath> extra_paths;
  double distance_offset = 0.0;  // meters added to the subject's path length
};

struct RoomSpec {
  std::string name;
  StaticPathSet static_paths;
  BackgroundFluctuation background;
  std::vector<LocationSpec> locations;  // empty means one location named after the room
};

struct SubjectSpec {
  std::string name;
  std::string label;  // person label written to the manifest; defaults to name
  double speed_scale = 1.0;
  double attenuation = 1.0;
  double distance = 3.0;
  double limb_ratio = 0.5;  // attenuation of the secondary (limb) path relative to the body
};

// Per-repetition random variation, uniform in +/- the given amount.
struct Variation {
  double speed_jitter = 0.05;      // relative
  double time_jitter = 0.2;        // seconds
  double distance_jitter = 0.3;    // meters
  double attenuation_jitter = 0.1; // relative
};

struct SynthConfig {
  std::uint64_t seed = 1;
  double duration = 5.0;
  int repetitions = 20;
  SyntheticChannelConfig channel;  // shared radio settings; paths are filled per trace
  std::vector<std::string> actions;
  std::vector<RoomSpec> rooms;
  std::vector<SubjectSpec> subjects;
  Variation variation;
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& cfg);

struct TraceJob {
  ManifestEntry entry;
  SyntheticChannelConfig channel;
  double duration = 5.0;
};

// rooms x locations x subjects x actions x repetitions, in that nesting order.
std::vector<TraceJob> plan_traces(const SynthConfig& cfg);
CsiTrace generate(const TraceJob& job);

} // namespace csisense
