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

#include "csisense/csi_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "csisense/error.hpp"

namespace csisense {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite value for ") + what);
  }
}

// Channel realization of one Tx-Rx pair after the seeded perturbation.
struct PairChannel {
  Eigen::VectorXcd static_response;  // H_s per subcarrier
  std::vector<double> attenuation;
  std::vector<double> phase;
};

} // namespace

void CsiTrace::validate() const {
  if (!(meta.nominal_rate > 0.0) || !std::isfinite(meta.nominal_rate)) {
    throw DataError("trace nominal rate must be positive");
  }
  if (frames.empty()) {
    return;
  }
  const Index p = pairs(), s = subcarriers();
  if (p < 1 || s < 1) {
    throw DataError("trace frames must have at least one pair and one subcarrier");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.gains.rows() != p || f.gains.cols() != s) {
      throw DataError("frame " + std::to_string(i) + " has inconsistent shape");
    }
    if (!std::isfinite(f.timestamp) || f.timestamp < 0.0) {
      throw DataError("frame " + std::to_string(i) + " has an invalid timestamp");
    }
    if (i > 0 && !(f.timestamp > frames[i - 1].timestamp)) {
      throw DataError("timestamps must be strictly increasing (frame " + std::to_string(i) + ")");
    }
  }
  if (meta.duration < frames.back().timestamp - frames.front().timestamp) {
    throw DataError("trace duration shorter than its timestamp span");
  }
}

void StaticPathSet::validate() const {
  if (paths.empty()) {
    throw std::invalid_argument("static path set needs at least the line-of-sight path");
  }
  for (const auto& p : paths) {
    require_finite(p.delay, "static path delay");
    require_finite(p.gain.real(), "static path gain");
    require_finite(p.gain.imag(), "static path gain");
    if (p.delay < paths.front().delay) {
      throw std::invalid_argument("line-of-sight path must have the minimal delay");
    }
  }
}

Complex StaticPathSet::response(double offset_hz) const {
  Complex h{0.0, 0.0};
  for (const auto& p : paths) {
    h += p.gain * std::polar(1.0, -kTwoPi * offset_hz * p.delay);
  }
  return h;
}

SpeedSchedule::SpeedSchedule(std::vector<SpeedSegment> segments) : segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    require_finite(segments_[i].start, "speed segment start");
    require_finite(segments_[i].speed, "speed segment speed");
    if (i > 0 && !(segments_[i].start > segments_[i - 1].start)) {
      throw std::invalid_argument("speed segments must have increasing start times");
    }
  }
}

double SpeedSchedule::speed_at(double t) const {
  double v = 0.0;
  for (const auto& s : segments_) {
    if (s.start > t) {
      break;
    }
    v = s.speed;
  }
  return v;
}

double SpeedSchedule::displacement(double t) const {
  double d = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double a = std::max(segments_[i].start, 0.0);
    const double b = i + 1 < segments_.size() ? segments_[i + 1].start : t;
    const double hi = std::min(b, t);
    if (hi > a) {
      d += segments_[i].speed * (hi - a);
    }
  }
  return d;
}

double SpeedSchedule::max_abs_speed() const {
  double m = 0.0;
  for (const auto& s : segments_) {
    m = std::max(m, std::abs(s.speed));
  }
  return m;
}

SpeedSchedule SpeedSchedule::scaled(double factor) const {
  auto segs = segments_;
  for (auto& s : segs) {
    s.speed *= factor;
  }
  return SpeedSchedule(std::move(segs));
}

SpeedSchedule SpeedSchedule::shifted(double dt) const {
  auto segs = segments_;
  for (auto& s : segs) {
    s.start += dt;
  }
  return SpeedSchedule(std::move(segs));
}

void SyntheticChannelConfig::validate() const {
  require_finite(wavelength, "wavelength");
  require_finite(carrier_offset, "carrier_offset");
  require_finite(noise_std, "noise_std");
  require_finite(sample_rate, "sample_rate");
  require_finite(subcarrier_spacing, "subcarrier_spacing");
  require_finite(pair_perturbation, "pair_perturbation");
  require_finite(background.depth, "background depth");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
  if (noise_std < 0.0) throw std::invalid_argument("noise_std must be non-negative");
  if (pairs < 1 || subcarriers < 1) throw std::invalid_argument("pairs and subcarriers must be >= 1");
  if (pair_perturbation < 0.0) throw std::invalid_argument("pair_perturbation must be non-negative");
  if (background.depth < 0.0) throw std::invalid_argument("background depth must be non-negative");
  for (double f : background.frequencies) require_finite(f, "background frequency");
  static_paths.validate();
  for (const auto& d : dynamic_paths) {
    require_finite(d.initial_distance, "dynamic path distance");
    require_finite(d.attenuation, "dynamic path attenuation");
    require_finite(d.initial_phase, "dynamic path phase");
    if (!(d.initial_distance > 0.0)) throw std::invalid_argument("dynamic path distance must be positive");
    if (d.attenuation < 0.0) throw std::invalid_argument("dynamic path attenuation must be non-negative");
    if (!(sample_rate > 2.0 * d.schedule.max_abs_speed() / wavelength)) {
      throw std::invalid_argument("sample_rate too low for the dynamic path speeds");
    }
  }
}

CsiTrace generate_trace(const SyntheticChannelConfig& cfg, double duration) {
  cfg.validate();
  if (!std::isfinite(duration) || !(duration > 0.0)) {
    throw std::invalid_argument("duration must be positive and finite");
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);

  std::vector<double> bg_phase(cfg.background.frequencies.size());
  for (auto& ph : bg_phase) ph = angle(rng);

  const Index P = cfg.pairs, S = cfg.subcarriers;
  const double pert = cfg.pair_perturbation;
  const double pi = std::numbers::pi;

  std::vector<PairChannel> channels(static_cast<std::size_t>(P));
  for (auto& ch : channels) {
    StaticPathSet perturbed = cfg.static_paths;
    for (auto& p : perturbed.paths) {
      const double mag = 1.0 + pert * unit(rng);
      const double rot = pert * pi * unit(rng);
      p.gain *= std::polar(mag, rot);
    }
    ch.static_response.resize(S);
    for (Index i = 0; i < S; ++i) {
      ch.static_response(i) = perturbed.response(static_cast<double>(i) * cfg.subcarrier_spacing);
    }
    for (const auto& d : cfg.dynamic_paths) {
      ch.attenuation.push_back(d.attenuation * (1.0 + pert * unit(rng)));
      ch.phase.push_back(d.initial_phase + pert * pi * unit(rng));
    }
  }

  const auto n_frames = static_cast<std::size_t>(std::floor(duration * cfg.sample_rate + 1e-9));
  const double noise_scale = cfg.noise_std / std::sqrt(2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CsiTrace trace;
  trace.meta.nominal_rate = cfg.sample_rate;
  trace.meta.duration = duration;
  trace.frames.resize(n_frames);

  std::vector<double> distance(cfg.dynamic_paths.size());
  for (std::size_t n = 0; n < n_frames; ++n) {
    const double t = static_cast<double>(n) / cfg.sample_rate;
    for (std::size_t k = 0; k < cfg.dynamic_paths.size(); ++k) {
      const auto& d = cfg.dynamic_paths[k];
      distance[k] = std::max(d.initial_distance + d.schedule.displacement(t), 0.0);
    }
    double g = 1.0;
    if (!bg_phase.empty() && cfg.background.depth > 0.0) {
      double acc = 0.0;
      for (std::size_t j = 0; j < bg_phase.size(); ++j) {
        acc += std::cos(kTwoPi * cfg.background.frequencies[j] * t + bg_phase[j]);
      }
      g += cfg.background.depth * acc / static_cast<double>(bg_phase.size());
    }
    const Complex offset = std::polar(1.0, -kTwoPi * cfg.carrier_offset * t);

    CsiFrame& frame = trace.frames[n];
    frame.timestamp = t;
    frame.gains.resize(P, S);
    for (Index p = 0; p < P; ++p) {
      const auto& ch = channels[static_cast<std::size_t>(p)];
      Eigen::VectorXcd h = g * ch.static_response;
      for (std::size_t k = 0; k < distance.size(); ++k) {
        // Phase 2 pi d / lambda_f split into the carrier term and a per-subcarrier step.
        Complex term = std::polar(ch.attenuation[k], -(kTwoPi * distance[k] / cfg.wavelength + ch.phase[k]));
        const Complex step = std::polar(1.0, -kTwoPi * cfg.subcarrier_spacing * distance[k] / kSpeedOfLight);
        for (Index i = 0; i < S; ++i) {
          h(i) += term;
          term *= step;
        }
      }
      h *= offset;
      if (noise_scale > 0.0) {
        for (Index i = 0; i < S; ++i) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          h(i) += Complex(noise_scale * re, noise_scale * im);
        }
      }
      frame.gains.row(p) = h.transpose();
    }
  }
  return trace;
}

std::vector<TapMagnitude> tap_profile(const CsiFrame& frame, Index pair) {
  if (pair < 0 || pair >= frame.gains.rows()) {
    throw std::out_of_range("pair index " + std::to_string(pair) + " out of range");
  }
  const Index S = frame.gains.cols();
  std::vector<Complex> spectrum(static_cast<std::size_t>(S));
  for (Index i = 0; i < S; ++i) spectrum[static_cast<std::size_t>(i)] = frame.gains(pair, i);

  Eigen::FFT<double> fft;  // inverse is 1/N scaled by default
  std::vector<Complex> taps;
  fft.inv(taps, spectrum);

  std::vector<TapMagnitude> out;
  out.reserve(taps.size());
  for (std::size_t n = 0; n < taps.size(); ++n) {
    out.push_back({static_cast<Index>(n), std::abs(taps[n])});
  }
  return out;
}

namespace {

struct CatalogEntry {
  const char* name;
  std::vector<SpeedSegment> segments;
};

// Alternating speeds v_a, v_b every `half` seconds over [t0, t1), zero afterwards.
std::vector<SpeedSegment> alternating(double t0, double t1, double half, double va, double vb) {
  std::vector<SpeedSegment> s;
  bool first = true;
  for (double t = t0; t < t1 - 1e-12; t += half) {
    s.push_back({t, first ? va : vb});
    first = !first;
  }
  s.push_back({t1, 0.0});
  return s;
}

std::vector<SpeedSegment> punches(double t0, double t1, double stroke, double rest, double v) {
  std::vector<SpeedSegment> s;
  for (double t = t0; t + 2.0 * stroke <= t1 + 1e-12; t += 2.0 * stroke + rest) {
    s.push_back({t, v});
    s.push_back({t + stroke, -v});
    s.push_back({t + 2.0 * stroke, 0.0});
  }
  return s;
}

// `count` hops starting at t0, one every `period` seconds, each phase lasting `step` seconds
// at peak speed v: crouch, push off, land, recover.
std::vector<SpeedSegment> hops(double t0, int count, double period, double step, double v) {
  std::vector<SpeedSegment> s{{0.0, 0.0}};
  for (int i = 0; i < count; ++i) {
    const double t = t0 + period * i;
    s.insert(s.end(), {{t, -0.4 * v}, {t + step, v}, {t + 2 * step, -v}, {t + 3 * step, 0.4 * v}, {t + 4 * step, 0.0}});
  }
  return s;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"still", {{0.0, 0.0}}},
      {"slow-wave", alternating(0.5, 4.5, 0.5, 0.3, -0.3)},
      {"fast-punch", punches(0.5, 4.5, 0.15, 0.2, 1.8)},
      {"walk-like", alternating(0.0, 5.0, 0.5, 1.0, 0.6)},
      {"run-like", alternating(0.0, 5.0, 0.25, 2.6, 1.8)},
      {"pick-up", {{0.0, 0.0}, {1.0, 0.5}, {2.0, 0.0}, {2.5, -0.5}, {3.5, 0.0}}},
      {"golf-swing", {{0.0, 0.0}, {1.0, -0.3}, {2.2, 0.0}, {2.4, 2.4}, {2.7, 0.8}, {3.2, 0.0}}},
      {"jump", hops(0.5, 8, 0.5, 0.1, 0.5)},
  };
  return entries;
}

} // namespace

SpeedSchedule action_speed_profile(std::string_view name) {
  for (const auto& e : catalog()) {
    if (name == e.name) {
      return SpeedSchedule(e.segments);
    }
  }
  throw std::invalid_argument("unknown action profile '" + std::string(name) + "'");
}

std::vector<std::string> action_catalog() {
  std::vector<std::string> names;
  for (const auto& e : catalog()) names.emplace_back(e.name);
  return names;
}

} // namespace csisense
