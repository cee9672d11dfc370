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

#include "csisense/preprocess.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csisense/error.hpp"

namespace csisense {

std::vector<Index> StreamMatrix::pairs() const {
  std::vector<Index> out;
  for (const auto& id : stream_map) {
    if (std::find(out.begin(), out.end(), id.pair) == out.end()) out.push_back(id.pair);
  }
  return out;
}

StreamMatrix StreamMatrix::pair_block(Index pair) const {
  std::vector<Index> cols;
  for (std::size_t c = 0; c < stream_map.size(); ++c) {
    if (stream_map[c].pair == pair) cols.push_back(static_cast<Index>(c));
  }
  if (cols.empty()) {
    throw std::out_of_range("no streams for pair " + std::to_string(pair));
  }
  StreamMatrix out;
  out.rate = rate;
  out.values.resize(values.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.values.col(static_cast<Index>(j)) = values.col(cols[j]);
    out.stream_map.push_back(stream_map[static_cast<std::size_t>(cols[j])]);
  }
  return out;
}

StreamMatrix interpolate(const CsiTrace& trace, double target_rate) {
  if (!(target_rate > 0.0) || !std::isfinite(target_rate)) {
    throw std::invalid_argument("target_rate must be positive");
  }
  if (trace.frames.size() < 2) {
    throw DataError("interpolation needs at least two frames");
  }
  trace.validate();

  const Index P = trace.pairs(), S = trace.subcarriers();
  const double t0 = trace.frames.front().timestamp;
  const double t1 = trace.frames.back().timestamp;
  const auto n = static_cast<Index>(std::floor((t1 - t0) * target_rate + 1e-9)) + 1;

  StreamMatrix out;
  out.rate = target_rate;
  out.values.resize(n, P * S);
  for (Index p = 0; p < P; ++p) {
    for (Index s = 0; s < S; ++s) out.stream_map.push_back({p, s});
  }

  std::size_t j = 0;
  Eigen::RowVectorXd a(P * S), b(P * S);
  auto amplitudes = [&](std::size_t idx, Eigen::RowVectorXd& dst) {
    const auto& g = trace.frames[idx].gains;
    for (Index p = 0; p < P; ++p) {
      for (Index s = 0; s < S; ++s) dst(p * S + s) = std::abs(g(p, s));
    }
  };
  amplitudes(0, a);
  amplitudes(1, b);
  for (Index k = 0; k < n; ++k) {
    const double t = std::min(t0 + static_cast<double>(k) / target_rate, t1);
    while (j + 2 < trace.frames.size() && trace.frames[j + 1].timestamp <= t) {
      ++j;
      a = b;
      amplitudes(j + 1, b);
    }
    const double ta = trace.frames[j].timestamp;
    const double tb = trace.frames[j + 1].timestamp;
    const double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    if (w == 0.0) {
      out.values.row(k) = a;
    } else {
      out.values.row(k) = (1.0 - w) * a + w * b;
    }
  }
  return out;
}

ButterworthLowpass::ButterworthLowpass(int order, double cutoff_hz, double rate_hz)
    : order_(order), cutoff_(cutoff_hz), rate_(rate_hz) {
  if (order < 1) throw std::invalid_argument("filter order must be >= 1");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw std::invalid_argument("rate must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate_hz / 2.0)) {
    throw std::invalid_argument("cutoff must lie in (0, Nyquist)");
  }
  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * rate_hz;
  const double warped = fs2 * std::tan(pi * cutoff_hz / rate_hz);

  // Upper-half-plane analog poles; the conjugates complete each section.
  for (int k = 0; k < order / 2; ++k) {
    const double theta = pi * (2.0 * k + order + 1) / (2.0 * order);
    const std::complex<double> s = warped * std::polar(1.0, theta);
    const std::complex<double> z = (fs2 + s) / (fs2 - s);
    Biquad q;
    q.a1 = -2.0 * z.real();
    q.a2 = std::norm(z);
    const double k_dc = (1.0 + q.a1 + q.a2) / 4.0;
    q.b0 = k_dc;
    q.b1 = 2.0 * k_dc;
    q.b2 = k_dc;
    sections_.push_back(q);
  }
  if (order % 2 == 1) {
    const double z = (fs2 - warped) / (fs2 + warped);
    Biquad q;
    q.a1 = -z;
    const double k_dc = (1.0 - z) / 2.0;
    q.b0 = k_dc;
    q.b1 = k_dc;
    sections_.push_back(q);
  }
}

std::complex<double> ButterworthLowpass::response(double freq_hz) const {
  const std::complex<double> zi = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / rate_);
  const std::complex<double> zi2 = zi * zi;
  std::complex<double> h{1.0, 0.0};
  for (const auto& q : sections_) {
    h *= (q.b0 + q.b1 * zi + q.b2 * zi2) / (1.0 + q.a1 * zi + q.a2 * zi2);
  }
  return h;
}

Eigen::VectorXd ButterworthLowpass::filter(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd y = x;
  if (y.size() == 0) return y;
  for (const auto& q : sections_) {
    // Transposed direct form II, state primed for a constant input equal to y[0].
    const double in0 = y(0);
    const double dc = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double out0 = dc * in0;
    double z2 = q.b2 * in0 - q.a2 * out0;
    double z1 = q.b1 * in0 - q.a1 * out0 + z2;
    for (Index i = 0; i < y.size(); ++i) {
      const double in = y(i);
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      y(i) = out;
    }
  }
  return y;
}

Eigen::VectorXd ButterworthLowpass::filtfilt(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Index n = x.size();
  if (n < 2) return x;
  const Index pad = std::min(pad_length(), n - 1);
  Eigen::VectorXd ext(n + 2 * pad);
  for (Index i = 0; i < pad; ++i) {
    ext(i) = 2.0 * x(0) - x(pad - i);
    ext(n + pad + i) = 2.0 * x(n - 1) - x(n - 2 - i);
  }
  ext.segment(pad, n) = x;
  Eigen::VectorXd fwd = filter(ext);
  Eigen::VectorXd back = filter(fwd.reverse());
  return back.reverse().segment(pad, n);
}

StreamMatrix lowpass(const StreamMatrix& m, int order, double cutoff_hz) {
  if (!(cutoff_hz < m.rate / 2.0)) {
    throw std::invalid_argument("cutoff must be below the Nyquist frequency");
  }
  const ButterworthLowpass design(order, cutoff_hz, m.rate);
  StreamMatrix out = m;
  for (Index c = 0; c < m.streams(); ++c) {
    out.values.col(c) = design.filtfilt(m.values.col(c));
  }
  return out;
}

StreamMatrix normalize(const StreamMatrix& m, double window_seconds) {
  if (!(window_seconds > 0.0)) throw std::invalid_argument("window must be positive");
  const auto window = static_cast<Index>(std::llround(window_seconds * m.rate));
  if (window < 1) throw std::invalid_argument("window shorter than one sample");
  StreamMatrix out = m;
  out.values = m.values - centered_moving_mean(m.values, window);
  return out;
}

} // namespace csisense
