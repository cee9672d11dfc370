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

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace csisense {

using Index = Eigen::Index;
using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

// One CSI measurement: complex gains indexed [pair, subcarrier].
struct CsiFrame {
  double timestamp = 0.0;
  Eigen::MatrixXcd gains;
};

struct TraceMeta {
  std::string action_label;
  std::string person_label;
  std::string room_label;
  double nominal_rate = 1000.0;
  double duration = 0.0;
};

struct CsiTrace {
  std::vector<CsiFrame> frames;
  TraceMeta meta;

  Index pairs() const { return frames.empty() ? 0 : frames.front().gains.rows(); }
  Index subcarriers() const { return frames.empty() ? 0 : frames.front().gains.cols(); }

  // Throws csisense::DataError when shape, timestamp or rate invariants fail.
  void validate() const;
};

struct StaticPath {
  double delay = 0.0;  // seconds
  Complex gain{1.0, 0.0};
};

// Aggregate of paths reflected by immobile objects. The first path with the
// smallest delay is the line-of-sight path.
struct StaticPathSet {
  std::vector<StaticPath> paths;

  void validate() const;
  // H_s at baseband offset frequency `offset_hz` from the first subcarrier.
  Complex response(double offset_hz) const;
};

// Piecewise-constant speed: segment i holds from segments[i].start until the
// next segment's start (the last one extends forever). Before the first start
// the speed is zero.
struct SpeedSegment {
  double start = 0.0;
  double speed = 0.0;  // m/s, positive lengthens the path
};

class SpeedSchedule {
public:
  SpeedSchedule() = default;
  explicit SpeedSchedule(std::vector<SpeedSegment> segments);

  const std::vector<SpeedSegment>& segments() const { return segments_; }
  double speed_at(double t) const;
  // Path length change accumulated over [0, t].
  double displacement(double t) const;
  double max_abs_speed() const;

  SpeedSchedule scaled(double factor) const;
  SpeedSchedule shifted(double dt) const;

private:
  std::vector<SpeedSegment> segments_;
};

struct DynamicPath {
  double initial_distance = 3.0;  // meters
  SpeedSchedule schedule;
  double attenuation = 1.0;
  double initial_phase = 0.0;  // radians
};

// Common-mode gain g(t) = 1 + depth * mean_j cos(2 pi f_j t + phi_j) on the
// static paths of every stream; phases are drawn per trace.
struct BackgroundFluctuation {
  double depth = 0.0;
  std::vector<double> frequencies;
};

struct SyntheticChannelConfig {
  double wavelength = 0.0566;  // 5.32 GHz
  double carrier_offset = 0.0;  // Hz
  StaticPathSet static_paths;
  std::vector<DynamicPath> dynamic_paths;
  double noise_std = 0.0;
  double sample_rate = 1000.0;
  Index pairs = 4;
  Index subcarriers = 30;
  double subcarrier_spacing = 312.5e3;
  double pair_perturbation = 0.2;
  BackgroundFluctuation background;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Frames follow H(f,t) = e^{-j2 pi df t} (g(t) H_s(f) + sum_k a_k e^{-j2 pi d_k(t) / lambda_f}) + n
// with lambda_f the wavelength of subcarrier f. The frame count is
// floor(duration * sample_rate).
CsiTrace generate_trace(const SyntheticChannelConfig& cfg, double duration);

struct TapMagnitude {
  Index tap = 0;
  double magnitude = 0.0;
};

// Magnitudes of the 1/S-normalized inverse DFT of one pair's subcarrier vector.
std::vector<TapMagnitude> tap_profile(const CsiFrame& frame, Index pair);

// Built-in named speed schedules; throws std::invalid_argument on unknown names.
SpeedSchedule action_speed_profile(std::string_view name);
std::vector<std::string> action_catalog();

} // namespace csisense
