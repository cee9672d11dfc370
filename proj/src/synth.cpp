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

#include "csisense/synth.hpp"

#include <numbers>
#include <random>
#include <stdexcept>

#include "csisense/error.hpp"

namespace csisense {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<StaticPath> paths_from_json(const nlohmann::json& arr) {
  std::vector<StaticPath> out;
  for (const auto& p : arr) {
    StaticPath sp;
    sp.delay = p.value("delay_ns", 0.0) * 1e-9;
    const auto g = p.at("gain");
    if (g.is_array()) {
      sp.gain = Complex(g.at(0).get<double>(), g.at(1).get<double>());
    } else {
      sp.gain = Complex(g.get<double>(), 0.0);
    }
    out.push_back(sp);
  }
  return out;
}

nlohmann::json paths_to_json(const std::vector<StaticPath>& paths) {
  auto arr = nlohmann::json::array();
  for (const auto& p : paths) {
    arr.push_back({{"delay_ns", p.delay * 1e9}, {"gain", {p.gain.real(), p.gain.imag()}}});
  }
  return arr;
}

} // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.duration = j.value("duration", c.duration);
    c.repetitions = j.value("repetitions", c.repetitions);
    if (j.contains("channel")) {
      const auto& ch = j.at("channel");
      c.channel.wavelength = ch.value("wavelength", c.channel.wavelength);
      c.channel.carrier_offset = ch.value("carrier_offset", c.channel.carrier_offset);
      c.channel.noise_std = ch.value("noise_std", c.channel.noise_std);
      c.channel.sample_rate = ch.value("sample_rate", c.channel.sample_rate);
      c.channel.pairs = ch.value("pairs", c.channel.pairs);
      c.channel.subcarriers = ch.value("subcarriers", c.channel.subcarriers);
      c.channel.subcarrier_spacing = ch.value("subcarrier_spacing", c.channel.subcarrier_spacing);
      c.channel.pair_perturbation = ch.value("pair_perturbation", c.channel.pair_perturbation);
    }
    c.actions = j.value("actions", std::vector<std::string>{});
    for (const auto& r : j.value("rooms", nlohmann::json::array())) {
      RoomSpec room;
      room.name = r.at("name").get<std::string>();
      room.static_paths.paths = paths_from_json(r.at("static_paths"));
      if (r.contains("background")) {
        room.background.depth = r.at("background").value("depth", 0.0);
        room.background.frequencies = r.at("background").value("frequencies", std::vector<double>{});
      }
      for (const auto& l : r.value("locations", nlohmann::json::array())) {
        LocationSpec loc;
        loc.name = l.at("name").get<std::string>();
        loc.distance_offset = l.value("distance_offset", 0.0);
        if (l.contains("extra_paths")) loc.extra_paths = paths_from_json(l.at("extra_paths"));
        room.locations.push_back(std::move(loc));
      }
      c.rooms.push_back(std::move(room));
    }
    for (const auto& s : j.value("subjects", nlohmann::json::array())) {
      SubjectSpec sub;
      sub.name = s.at("name").get<std::string>();
      sub.label = s.value("label", sub.name);
      sub.speed_scale = s.value("speed_scale", sub.speed_scale);
      sub.attenuation = s.value("attenuation", sub.attenuation);
      sub.distance = s.value("distance", sub.distance);
      sub.limb_ratio = s.value("limb_ratio", sub.limb_ratio);
      c.subjects.push_back(std::move(sub));
    }
    if (j.contains("variation")) {
      const auto& v = j.at("variation");
      c.variation.speed_jitter = v.value("speed_jitter", c.variation.speed_jitter);
      c.variation.time_jitter = v.value("time_jitter", c.variation.time_jitter);
      c.variation.distance_jitter = v.value("distance_jitter", c.variation.distance_jitter);
      c.variation.attenuation_jitter = v.value("attenuation_jitter", c.variation.attenuation_jitter);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed synth config: ") + ex.what());
  }
  if (c.repetitions < 0) throw DataError("repetitions must be non-negative");
  if (!(c.duration > 0.0)) throw DataError("duration must be positive");
  if (c.actions.empty()) throw DataError("synth config lists no actions");
  if (c.rooms.empty()) throw DataError("synth config lists no rooms");
  for (const auto& a : c.actions) action_speed_profile(a);
  return c;
}

nlohmann::json to_json(const SynthConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["duration"] = c.duration;
  j["repetitions"] = c.repetitions;
  j["channel"] = {{"wavelength", c.channel.wavelength},
                  {"carrier_offset", c.channel.carrier_offset},
                  {"noise_std", c.channel.noise_std},
                  {"sample_rate", c.channel.sample_rate},
                  {"pairs", c.channel.pairs},
                  {"subcarriers", c.channel.subcarriers},
                  {"subcarrier_spacing", c.channel.subcarrier_spacing},
                  {"pair_perturbation", c.channel.pair_perturbation}};
  j["actions"] = c.actions;
  j["rooms"] = nlohmann::json::array();
  for (const auto& r : c.rooms) {
    nlohmann::json rj{{"name", r.name},
                      {"static_paths", paths_to_json(r.static_paths.paths)},
                      {"background", {{"depth", r.background.depth}, {"frequencies", r.background.frequencies}}}};
    rj["locations"] = nlohmann::json::array();
    for (const auto& l : r.locations) {
      rj["locations"].push_back(
          {{"name", l.name}, {"distance_offset", l.distance_offset}, {"extra_paths", paths_to_json(l.extra_paths)}});
    }
    j["rooms"].push_back(std::move(rj));
  }
  j["subjects"] = nlohmann::json::array();
  for (const auto& s : c.subjects) {
    j["subjects"].push_back({{"name", s.name},
                             {"label", s.label},
                             {"speed_scale", s.speed_scale},
                             {"attenuation", s.attenuation},
                             {"distance", s.distance},
                             {"limb_ratio", s.limb_ratio}});
  }
  j["variation"] = {{"speed_jitter", c.variation.speed_jitter},
                    {"time_jitter", c.variation.time_jitter},
                    {"distance_jitter", c.variation.distance_jitter},
                    {"attenuation_jitter", c.variation.attenuation_jitter}};
  return j;
}

std::vector<TraceJob> plan_traces(const SynthConfig& cfg) {
  std::vector<SubjectSpec> subjects = cfg.subjects;
  if (subjects.empty()) subjects.push_back({"subject", "subject"});
  for (auto& s : subjects) {
    if (s.label.empty()) s.label = s.name;
  }

  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<TraceJob> jobs;
  std::uint64_t index = 0;
  for (const auto& room : cfg.rooms) {
    std::vector<LocationSpec> locations = room.locations;
    if (locations.empty()) locations.push_back({room.name, {}, 0.0});
    for (const auto& loc : locations) {
      for (const auto& sub : subjects) {
        for (const auto& action : cfg.actions) {
          const SpeedSchedule base = action_speed_profile(action);
          for (int rep = 0; rep < cfg.repetitions; ++rep, ++index) {
            std::mt19937_64 rng(splitmix(cfg.seed ^ splitmix(index)));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            std::uniform_real_distribution<double> phase(0.0, two_pi);
            const auto& var = cfg.variation;

            TraceJob job;
            job.duration = cfg.duration;
            job.channel = cfg.channel;
            job.channel.static_paths = room.static_paths;
            for (const auto& extra : loc.extra_paths) job.channel.static_paths.paths.push_back(extra);
            job.channel.background = room.background;
            job.channel.rng_seed = splitmix(cfg.seed + 0x5bd1e995ULL * (index + 1));

            const double speed = sub.speed_scale * (1.0 + var.speed_jitter * u(rng));
            const double shift = var.time_jitter * u(rng);
            const double dist = sub.distance + loc.distance_offset + var.distance_jitter * u(rng);
            const double att = sub.attenuation * (1.0 + var.attenuation_jitter * u(rng));
            DynamicPath body{std::max(dist, 0.5), base.scaled(speed).shifted(shift), att, phase(rng)};
            DynamicPath limb{std::max(dist, 0.5) + 0.4, base.scaled(1.4 * speed).shifted(shift), att * sub.limb_ratio,
                             phase(rng)};
            job.channel.dynamic_paths = {body, limb};

            job.entry.action_label = action;
            job.entry.person_label = sub.label;
            job.entry.room_label = room.name;
            job.entry.location_label = loc.name;
            job.entry.trace_path = "traces/" + room.name + "_" + loc.name + "_" + sub.name + "_" + action + "_" +
                                   std::to_string(rep) + ".csit";
            jobs.push_back(std::move(job));
          }
        }
      }
    }
  }
  return jobs;
}

CsiTrace generate(const TraceJob& job) {
  CsiTrace t = generate_trace(job.channel, job.duration);
  t.meta.action_label = job.entry.action_label;
  t.meta.person_label = job.entry.person_label;
  t.meta.room_label = job.entry.room_label;
  return t;
}

} // namespace csisense
