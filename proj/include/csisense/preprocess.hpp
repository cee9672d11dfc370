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

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "csisense/csi_model.hpp"

namespace csisense {

struct StreamId {
  Index pair = 0;
  Index subcarrier = 0;
  bool operator==(const StreamId&) const = default;
};

// Real amplitude matrix, rows are time samples and columns are streams.
struct StreamMatrix {
  Eigen::MatrixXd values;
  double rate = 1000.0;
  std::vector<StreamId> stream_map;

  Index samples() const { return values.rows(); }
  Index streams() const { return values.cols(); }
  // Distinct pair indices in stream order.
  std::vector<Index> pairs() const;
  // Columns belonging to one pair, in stream order.
  StreamMatrix pair_block(Index pair) const;
};

// Resample |gain| of every (pair, subcarrier) stream onto a uniform grid from
// the first to the last timestamp.
StreamMatrix interpolate(const CsiTrace& trace, double target_rate);

// Cascade of second-order sections, each b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

class ButterworthLowpass {
public:
  // Digital design via bilinear transform with frequency prewarping.
  ButterworthLowpass(int order, double cutoff_hz, double rate_hz);

  int order() const { return order_; }
  double cutoff() const { return cutoff_; }
  double rate() const { return rate_; }
  const std::vector<Biquad>& sections() const { return sections_; }

  std::complex<double> response(double freq_hz) const;

  // Single causal pass with steady-state initial conditions for x[0].
  Eigen::VectorXd filter(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // Forward-backward pass with odd reflection padding of pad_length() samples.
  Eigen::VectorXd filtfilt(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Index pad_length() const { return 3 * (order_ + 1); }

private:
  int order_;
  double cutoff_, rate_;
  std::vector<Biquad> sections_;
};

StreamMatrix lowpass(const StreamMatrix& m, int order = 5, double cutoff_hz = 50.0);

// Centered moving mean over `window` samples, truncated at the boundaries.
// Column-wise, O(T) per column via prefix sums.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
centered_moving_mean(const Eigen::MatrixBase<Derived>& x, Index window) {
  using Scalar = typename Derived::Scalar;
  const Index T = x.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(T, x.cols());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> prefix(T + 1);
  const Index before = (window - 1) / 2;
  for (Index c = 0; c < x.cols(); ++c) {
    prefix(0) = Scalar(0);
    for (Index t = 0; t < T; ++t) prefix(t + 1) = prefix(t) + x(t, c);
    for (Index t = 0; t < T; ++t) {
      const Index lo = std::max<Index>(t - before, 0);
      const Index hi = std::min<Index>(t - before + window, T);
      out(t, c) = (prefix(hi) - prefix(lo)) / Scalar(hi - lo);
    }
  }
  return out;
}

// out[t] = in[t] - centered moving mean over round(window_seconds * rate) samples.
StreamMatrix normalize(const StreamMatrix& m, double window_seconds = 0.3);

} // namespace csisense
