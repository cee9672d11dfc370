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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "csisense/features.hpp"
#include "oracles.hpp"

using namespace csisense;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

StreamMatrix stream(const Eigen::MatrixXd& v) {
  StreamMatrix m;
  m.values = v;
  for (Index c = 0; c < v.cols(); ++c) m.stream_map.push_back({0, c});
  return m;
}

ChannelImage image(const Eigen::MatrixXd& px) { return {px, 0}; }

Eigen::MatrixXd uniform(Index r, Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u;
  Eigen::MatrixXd m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Gaussian blobs around `centers`, `per` points each.
Eigen::MatrixXd planted(const Eigen::MatrixXd& centers, Index per, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  Eigen::MatrixXd x(centers.rows() * per, centers.cols());
  for (Index c = 0; c < centers.rows(); ++c)
    for (Index i = 0; i < per; ++i)
      for (Index d = 0; d < centers.cols(); ++d) x(c * per + i, d) = centers(c, d) + g(rng);
  return x;
}

// Rows sorted lexicographically, for order-free centroid comparison.
Eigen::MatrixXd sorted_rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::RowVectorXd> rows;
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) out.row(i) = rows[static_cast<std::size_t>(i)];
  return out;
}

} // namespace

TEST_CASE("constant matrix renders as uniform 0.5", "[features]") {
  const ChannelImage img = to_image(stream(Eigen::MatrixXd::Constant(100, 30, 3.3)), 20, 40);
  CHECK(img.height() == 20);
  CHECK(img.width() == 40);
  CHECK((img.pixels.array() - 0.5).abs().maxCoeff() == 0.0);
}

TEST_CASE("same-size render is the min-max normalized transpose", "[features]") {
  const Eigen::MatrixXd v = (uniform(12, 5, 1).array() * 4.0 - 1.0).matrix();
  const ChannelImage img = to_image(stream(v), 5, 12);
  const Eigen::MatrixXd expect = ((v.transpose().array() - v.minCoeff()) / (v.maxCoeff() - v.minCoeff())).matrix();
  CHECK((img.pixels - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(img.pixels.minCoeff() == 0.0);
  CHECK(img.pixels.maxCoeff() == 1.0);
}

TEST_CASE("bilinear upscale of a 2x2 checker", "[features]") {
  Eigen::MatrixXd src(2, 2);
  src << 0, 1, 1, 0;
  const Eigen::MatrixXd out = resize_bilinear(src, 3, 3);
  CHECK(out(1, 1) == Approx(0.5).margin(1e-15));
  // Half-pixel centers: output 0 maps to source -1/6, clamped to 0.
  CHECK(out(0, 0) == Approx(0.0).margin(1e-15));
  CHECK(out(0, 1) == Approx(0.5).margin(1e-15));
}

TEST_CASE("bilinear resize matches hand-evaluated weights", "[features]") {
  const Eigen::MatrixXd src = uniform(7, 9, 2);
  const Eigen::MatrixXd out = resize_bilinear(src, 4, 5);
  auto sample = [&](double y, double x) {
    y = std::clamp(y, 0.0, 6.0);
    x = std::clamp(x, 0.0, 8.0);
    const auto y0 = static_cast<Index>(y), x0 = static_cast<Index>(x);
    const Index y1 = std::min<Index>(y0 + 1, 6), x1 = std::min<Index>(x0 + 1, 8);
    const double wy = y - y0, wx = x - x0;
    return (1 - wy) * ((1 - wx) * src(y0, x0) + wx * src(y0, x1)) + wy * ((1 - wx) * src(y1, x0) + wx * src(y1, x1));
  };
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 5; ++c)
      CHECK(out(r, c) == Approx(sample((r + 0.5) * 7.0 / 4.0 - 0.5, (c + 0.5) * 9.0 / 5.0 - 0.5)).margin(1e-14));
}

TEST_CASE("normalization preserves the ordering of source cells", "[features]") {
  const Eigen::MatrixXd v = (uniform(40, 6, 3).array() * 9.0 - 2.0).matrix();
  const ChannelImage img = to_image(stream(v), 6, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const Index a = trial % 40, b = (trial * 7 + 3) % 40, s = trial % 6, u = (trial + 1) % 6;
    if (v(a, s) < v(b, u)) CHECK(img.pixels(s, a) < img.pixels(u, b));
  }
}

TEST_CASE("Gabor bank layout", "[features]") {
  const GaborBank bank;
  CHECK(bank.size() == 48);
  CHECK(bank.feature_length() == 96);
  CHECK(bank.kernels().front().rows() == 15);
  CHECK(bank.orientation(3) == Approx(kPi / 2));
  CHECK(bank.wavelength(2) == Approx(8.0));
  CHECK_THROWS(GaborBank(GaborParams{8, 6, 14}));
}

TEST_CASE("Gabor features of a zero image are zero", "[features]") {
  const FeatureVector fv = gabor_features(image(Eigen::MatrixXd::Zero(40, 50)), GaborBank());
  CHECK(fv.values.size() == 96);
  CHECK(fv.values.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fv.kind == FeatureKind::Gabor96);
}

TEST_CASE("Gabor response of a constant image is the DC gain", "[features]") {
  const GaborBank bank;
  const double c = 0.7;
  const FeatureVector fv = gabor_features(image(Eigen::MatrixXd::Constant(40, 50, c)), bank);
  for (Index i = 0; i < bank.size(); ++i) {
    const double dc = std::abs(bank.kernels()[static_cast<std::size_t>(i)].sum());
    CHECK(fv.values(2 * i) == Approx(c * dc).margin(1e-10));
    CHECK(fv.values(2 * i + 1) < 1e-10);
  }
}

TEST_CASE("FFT Gabor responses equal direct convolution", "[features]") {
  GaborParams p;
  p.n_scales = 2;
  p.n_orientations = 3;
  p.kernel_size = 9;
  const GaborBank bank(p);
  const Eigen::MatrixXd px = uniform(20, 27, 5);
  const GaborPlan plan(bank, 20, 27);
  const Eigen::MatrixXcd spec = plan.image_spectrum(px);
  for (Index k = 0; k < bank.size(); ++k) {
    const Eigen::MatrixXd ref = oracle::convolve_reflect101(px, bank.kernels()[static_cast<std::size_t>(k)]).cwiseAbs();
    CHECK((plan.response_magnitude(spec, k) - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("matched grating excites its own orientation", "[features]") {
  const GaborBank bank;
  const Index scale = 2;
  const double lambda = bank.wavelength(scale);
  // Intensity varies along x only: stripes are vertical, wave vector at theta = 0.
  Eigen::MatrixXd px(48, 64);
  for (Index y = 0; y < 48; ++y)
    for (Index x = 0; x < 64; ++x) px(y, x) = 0.5 + 0.5 * std::cos(2 * kPi * x / lambda);
  const FeatureVector fv = gabor_features(image(px), bank);
  const Index matched = scale * 6 + 0, orthogonal = scale * 6 + 3;
  CHECK(fv.values(2 * matched) > fv.values(2 * orthogonal));
  // Same comparison with the direct-convolution oracle.
  const double m0 = oracle::convolve_reflect101(px, bank.kernels()[matched]).cwiseAbs().mean();
  const double m3 = oracle::convolve_reflect101(px, bank.kernels()[orthogonal]).cwiseAbs().mean();
  CHECK(m0 > m3);
  CHECK(fv.values(2 * matched) == Approx(m0).epsilon(1e-9));
}

TEST_CASE("constant offset moves Gabor statistics by at most c times the DC gain", "[features]") {
  const GaborBank bank;
  const double c = 0.3;
  const Eigen::MatrixXd px = uniform(40, 40, 6) * 0.5;
  const FeatureVector a = gabor_features(image(px), bank);
  const FeatureVector b = gabor_features(image((px.array() + c).matrix()), bank);
  for (Index i = 0; i < bank.size(); ++i) {
    const double dc = std::abs(bank.kernels()[static_cast<std::size_t>(i)].sum());
    CHECK(std::abs(b.values(2 * i) - a.values(2 * i)) <= c * dc + 1e-12);
    CHECK(std::abs(b.values(2 * i + 1) - a.values(2 * i + 1)) <= c * dc + 1e-12);
  }
}

TEST_CASE("dense SIFT on a constant image is all zeros", "[features]") {
  const Eigen::MatrixXd d = sift_descriptors(image(Eigen::MatrixXd::Constant(48, 64, 0.4)));
  CHECK(d.cols() == 128);
  CHECK(d.rows() == 5 * 7);
  CHECK(d.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense SIFT is deterministic", "[features]") {
  const Eigen::MatrixXd px = uniform(40, 40, 7);
  CHECK(sift_descriptors(image(px)) == sift_descriptors(image(Eigen::MatrixXd(px))));
}

TEST_CASE("step edge votes for the gradient-normal orientation", "[features]") {
  // Dark left half, bright right half: gradient points along +x, orientation bin 0.
  Eigen::MatrixXd px = Eigen::MatrixXd::Zero(32, 64);
  px.rightCols(32).setOnes();
  const Eigen::MatrixXd d = sift_descriptors(image(px), {8, 16});
  Index on_edge = 0;
  for (Index i = 0; i < d.rows(); ++i) {
    if (d.row(i).norm() == 0.0) continue;
    ++on_edge;
    Eigen::VectorXd bins = Eigen::VectorXd::Zero(8);
    for (Index c = 0; c < 16; ++c) bins += d.row(i).segment(c * 8, 8).transpose();
    Index arg;
    bins.maxCoeff(&arg);
    CHECK(arg == 0);
  }
  CHECK(on_edge > 0);
  // Transposed step: gradient along +y, bin 2 (pi / 2).
  const Eigen::MatrixXd dt = sift_descriptors(image(Eigen::MatrixXd(px.transpose())), {8, 16});
  for (Index i = 0; i < dt.rows(); ++i) {
    if (dt.row(i).norm() == 0.0) continue;
    Eigen::VectorXd bins = Eigen::VectorXd::Zero(8);
    for (Index c = 0; c < 16; ++c) bins += dt.row(i).segment(c * 8, 8).transpose();
    Index arg;
    bins.maxCoeff(&arg);
    CHECK(arg == 2);
  }
}

TEST_CASE("SIFT descriptors are unit length", "[features]") {
  const Eigen::MatrixXd d = sift_descriptors(image(uniform(48, 48, 8)));
  for (Index i = 0; i < d.rows(); ++i) {
    CHECK(d.row(i).norm() == Approx(1.0).epsilon(1e-12));
    CHECK(d.row(i).minCoeff() >= 0.0);
  }
}

TEST_CASE("k-means finds planted cluster means", "[features]") {
  Eigen::MatrixXd centers(4, 3);
  centers << 0, 0, 0, 50, 0, 0, 0, 50, 0, 0, 0, 50;
  const Eigen::MatrixXd x = planted(centers, 30, 0.5, 9);
  const Codebook cb = train_codebook(x, 4, 123);
  const auto assign = assign_nearest(x, cb.centroids);
  for (Index c = 0; c < 4; ++c) {
    const Eigen::RowVectorXd mean = x.middleRows(c * 30, 30).colwise().mean();
    const Index j = assign[static_cast<std::size_t>(c * 30)];
    CHECK((cb.centroids.row(j) - mean).norm() < 1e-9);
  }
}

TEST_CASE("k-means is unchanged by duplicating every point", "[features]") {
  Eigen::MatrixXd centers(3, 2);
  centers << 0, 0, 20, 0, 0, 20;
  const Eigen::MatrixXd x = planted(centers, 25, 1.0, 10);
  Eigen::MatrixXd twice(2 * x.rows(), x.cols());
  twice << x, x;
  const Codebook a = train_codebook(x, 3, 5), b = train_codebook(twice, 3, 5);
  CHECK((sorted_rows(a.centroids) - sorted_rows(b.centroids)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("k-means of one repeated point", "[features]") {
  const Eigen::MatrixXd x = Eigen::RowVectorXd::LinSpaced(5, 1.0, 5.0).replicate(10, 1);
  const Codebook cb = train_codebook(x, 1, 0);
  CHECK(cb.centroids == x.topRows(1));
  CHECK_THROWS(train_codebook(x, 2, 0));
}

TEST_CASE("k-means inertia never increases and is seed-reproducible", "[features]") {
  const Eigen::MatrixXd x = uniform(300, 8, 11);
  const Codebook a = train_codebook(x, 12, 77), b = train_codebook(x, 12, 77);
  CHECK(a.centroids == b.centroids);
  CHECK(a.inertia_history == b.inertia_history);
  for (std::size_t i = 1; i < a.inertia_history.size(); ++i) CHECK(a.inertia_history[i] <= a.inertia_history[i - 1]);
}

TEST_CASE("bag of words histograms", "[features]") {
  const Eigen::MatrixXd cents = uniform(48, 128, 12);
  Codebook cb;
  cb.centroids = cents;
  SECTION("descriptors on a centroid") {
    const FeatureVector fv = bow_quantize(cents.row(17).replicate(5, 1), cb);
    CHECK(fv.values.size() == 48);
    CHECK(fv.values(17) == 1.0);
    CHECK(fv.values.sum() == 1.0);
  }
  SECTION("empty list") {
    const FeatureVector fv = bow_quantize(Eigen::MatrixXd(0, 128), cb);
    CHECK(fv.values.size() == 48);
    CHECK(fv.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fv.degenerate);
  }
  SECTION("matches a brute-force nearest-neighbour scan") {
    const Eigen::MatrixXd d = uniform(200, 128, 13);
    const FeatureVector fv = bow_quantize(d, cb, 2);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(48);
    for (Index i = 0; i < d.rows(); ++i) ref(oracle::nearest_row(d.row(i).transpose(), cents)) += 1.0 / 200.0;
    CHECK((fv.values - ref).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(fv.pair == 2);
    CHECK(fv.values.minCoeff() >= 0.0);
  }
}
