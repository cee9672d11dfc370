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

#include <cmath>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "csisense/error.hpp"
#include "csisense/preprocess.hpp"
#include "oracles.hpp"

using namespace csisense;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

StreamMatrix column(const Eigen::VectorXd& x, double rate = 1000.0) {
  StreamMatrix m;
  m.values = x;
  m.rate = rate;
  m.stream_map = {{0, 0}};
  return m;
}

Eigen::VectorXd sinusoid(double freq, Index n, double rate = 1000.0) {
  Eigen::VectorXd x(n);
  for (Index t = 0; t < n; ++t) x(t) = std::sin(2.0 * kPi * freq * static_cast<double>(t) / rate);
  return x;
}

CsiTrace amplitude_trace(const std::vector<double>& times, const std::vector<double>& amps) {
  CsiTrace t;
  t.meta.duration = times.back() - times.front();
  for (std::size_t i = 0; i < times.size(); ++i) {
    CsiFrame f;
    f.timestamp = times[i];
    f.gains = Eigen::MatrixXcd::Constant(1, 1, Complex(0.0, amps[i]));
    t.frames.push_back(f);
  }
  return t;
}

} // namespace

TEST_CASE("interpolate fills a linear midpoint", "[preprocess]") {
  const StreamMatrix m = interpolate(amplitude_trace({0.0, 0.002}, {0.0, 2.0}), 1000.0);
  REQUIRE(m.samples() == 3);
  CHECK(m.values(0, 0) == Approx(0.0));
  CHECK(m.values(1, 0) == Approx(1.0));
  CHECK(m.values(2, 0) == Approx(2.0));
  CHECK(m.rate == 1000.0);
}

TEST_CASE("interpolate is the identity on the target grid", "[preprocess]") {
  std::vector<double> ts, as;
  for (int i = 0; i < 50; ++i) {
    ts.push_back(i * 0.001);
    as.push_back(1.0 + std::sin(0.3 * i) * 0.5);
  }
  const StreamMatrix m = interpolate(amplitude_trace(ts, as), 1000.0);
  REQUIRE(m.samples() == 50);
  for (int i = 0; i < 50; ++i) CHECK(m.values(i, 0) == Approx(as[static_cast<std::size_t>(i)]).margin(1e-12));
}

TEST_CASE("interpolate reproduces a constant from jittered timestamps", "[preprocess]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(0.0002, 0.0018);
  CsiTrace t;
  double now = 0.0;
  for (int i = 0; i < 400; ++i) {
    CsiFrame f;
    f.timestamp = now;
    f.gains = Eigen::MatrixXcd::Constant(2, 3, Complex(3.0, 4.0));
    f.gains(1, 2) = Complex(-1.5, 0.0);
    t.frames.push_back(f);
    now += jitter(rng);
  }
  t.meta.duration = now;
  const StreamMatrix m = interpolate(t, 1000.0);
  CHECK(m.streams() == 6);
  CHECK((m.values.leftCols(5).array() - 5.0).abs().maxCoeff() < 1e-12);
  CHECK((m.values.col(5).array() - 1.5).abs().maxCoeff() < 1e-12);
}

TEST_CASE("interpolate rejects short or unordered traces", "[preprocess]") {
  CHECK_THROWS_AS(interpolate(amplitude_trace({0.0}, {1.0}), 1000.0), DataError);
  CHECK_THROWS_AS(interpolate(amplitude_trace({0.0, 0.002, 0.001}, {1.0, 1.0, 1.0}), 1000.0), DataError);
  CHECK_THROWS(interpolate(amplitude_trace({0.0, 0.001}, {1.0, 1.0}), 0.0));
}

TEST_CASE("Butterworth design matches its frequency response", "[preprocess]") {
  const ButterworthLowpass f(5, 50.0, 1000.0);
  CHECK(f.sections().size() == 3);
  for (double hz : {0.0, 10.0, 50.0, 100.0, 200.0, 450.0}) {
    CHECK(std::abs(f.response(hz)) == Approx(oracle::sos_magnitude(f.sections(), hz, 1000.0)).margin(1e-12));
  }
  CHECK(20.0 * std::log10(std::abs(f.response(50.0))) == Approx(-3.0103).margin(0.1));
  CHECK(20.0 * std::log10(std::abs(f.response(100.0))) <= -25.0);
  CHECK(std::abs(f.response(0.0)) == Approx(1.0).margin(1e-12));
}

TEST_CASE("lowpass passes DC unchanged", "[preprocess]") {
  const StreamMatrix m = lowpass(column(Eigen::VectorXd::Constant(500, 4.2)));
  CHECK((m.values.array() - 4.2).abs().maxCoeff() < 1e-9);
}

TEST_CASE("filtfilt halves a 50 Hz sinusoid", "[preprocess]") {
  const StreamMatrix m = lowpass(column(sinusoid(50.0, 4000)));
  const double amp = m.values.col(0).segment(1000, 2000).cwiseAbs().maxCoeff();
  CHECK(amp == Approx(0.5).margin(0.02));
}

TEST_CASE("filtfilt suppresses 200 Hz to the squared response", "[preprocess]") {
  const StreamMatrix m = lowpass(column(sinusoid(200.0, 4000)));
  const double amp = m.values.col(0).segment(1000, 2000).cwiseAbs().maxCoeff();
  const ButterworthLowpass f(5, 50.0, 1000.0);
  const double g = oracle::sos_magnitude(f.sections(), 200.0, 1000.0);
  CHECK(amp <= 0.002);
  CHECK(amp == Approx(g * g).margin(1e-6));
}

TEST_CASE("filtfilt is zero-phase on a symmetric pulse", "[preprocess]") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(801);
  for (Index t = 0; t < x.size(); ++t) x(t) = std::exp(-std::pow((t - 400) / 15.0, 2));
  const StreamMatrix m = lowpass(column(x));
  Index peak;
  m.values.col(0).maxCoeff(&peak);
  CHECK(peak == 400);
}

TEST_CASE("lowpass output of bounded input stays bounded", "[preprocess]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(1000);
    for (auto& v : x) v = u(rng);
    const StreamMatrix m = lowpass(column(x));
    CHECK(m.values.allFinite());
    CHECK(m.values.cwiseAbs().maxCoeff() < 4.0);
  }
  const ButterworthLowpass f(5, 50.0, 1000.0);
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(5000);
  impulse(1) = 1.0;  // state is primed from sample 0, so start at rest
  const Eigen::VectorXd h = f.filter(impulse);
  CHECK(h.squaredNorm() < 1.0);
  CHECK(std::abs(h.tail(100).maxCoeff()) < 1e-12);
}

TEST_CASE("lowpass and normalize preserve shape", "[preprocess]") {
  StreamMatrix m;
  m.values = Eigen::MatrixXd::Random(700, 6);
  m.rate = 800.0;
  for (Index i = 0; i < 6; ++i) m.stream_map.push_back({i / 3, i % 3});
  for (const StreamMatrix& o : {lowpass(m, 5, 50.0), normalize(m, 0.3)}) {
    CHECK(o.samples() == 700);
    CHECK(o.streams() == 6);
    CHECK(o.rate == 800.0);
    CHECK(o.stream_map == m.stream_map);
  }
}

TEST_CASE("normalize zeroes a constant stream", "[preprocess]") {
  const StreamMatrix m = normalize(column(Eigen::VectorXd::Constant(1000, 7.0)), 0.3);
  CHECK(m.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize of an impulse leaves 1 - 1/W", "[preprocess]") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1000);
  x(500) = 1.0;
  const StreamMatrix m = normalize(column(x), 0.3);
  CHECK(m.values(500, 0) == Approx(1.0 - 1.0 / 300.0).margin(1e-12));
}

TEST_CASE("centered moving mean matches the brute-force window", "[preprocess]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(600);
  for (auto& v : x) v = g(rng);
  for (Index w : {1, 2, 7, 30, 299, 300, 600}) {
    const Eigen::MatrixXd mm = centered_moving_mean(x, w);
    for (Index t = 0; t < x.size(); t += 13) CHECK(mm(t, 0) == Approx(oracle::window_mean(x, t, w)).margin(1e-12));
  }
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> xl = x.cast<long double>();
  CHECK(std::abs(static_cast<double>(centered_moving_mean(xl, 9)(100, 0)) - oracle::window_mean(x, 100, 9)) < 1e-12);
}

TEST_CASE("normalized output has zero windowed mean with a full-length window", "[preprocess]") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(3.0, 1.0);
  Eigen::VectorXd x(500);
  for (auto& v : x) v = g(rng);
  const StreamMatrix m = normalize(column(x), 2.0 * 500 / 1000.0 - 0.001);
  for (Index t = 200; t < 300; t += 7) {
    // window 999 covers the whole series from any interior point
    CHECK(std::abs(oracle::window_mean(m.values.col(0), t, 999)) < 1e-9);
  }
  const StreamMatrix again = normalize(m, 0.999);
  CHECK((again.values - m.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pair block keeps one pair", "[preprocess]") {
  StreamMatrix m;
  m.values = Eigen::MatrixXd::Random(10, 4);
  m.stream_map = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(m.pairs() == std::vector<Index>{0, 1});
  const StreamMatrix b = m.pair_block(1);
  CHECK(b.values == m.values.rightCols(2));
  CHECK(b.stream_map.front().pair == 1);
  CHECK_THROWS(m.pair_block(5));
}
