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

#include "csisense/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "csisense/error.hpp"

namespace csisense {

namespace {

constexpr double kPi = std::numbers::pi;

Index next_smooth(Index n) {
  for (Index m = std::max<Index>(n, 1);; ++m) {
    Index r = m;
    for (Index f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

// reflect-101: ... c b | a b c d | c b ...
Index reflect101(Index i, Index n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// 1-D transforms along each row in [first, first + count).
void fft_rows(Eigen::MatrixXcd& m, bool inverse, Index first, Index count) {
  thread_local Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(m.cols())), out;
  for (Index r = first; r < first + count; ++r) {
    for (Index c = 0; c < m.cols(); ++c) in[static_cast<std::size_t>(c)] = m(r, c);
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = out[static_cast<std::size_t>(c)];
  }
}

void fft_cols(Eigen::MatrixXcd& m, bool inverse) {
  thread_local Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(m.rows())), out;
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) in[static_cast<std::size_t>(r)] = m(r, c);
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (Index r = 0; r < m.rows(); ++r) m(r, c) = out[static_cast<std::size_t>(r)];
  }
}

void fft2(Eigen::MatrixXcd& m, bool inverse) {
  fft_rows(m, inverse, 0, m.rows());
  fft_cols(m, inverse);
}

} // namespace

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, Index out_h, Index out_w) {
  if (src.size() == 0) throw std::invalid_argument("cannot resize an empty matrix");
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("output size must be positive");
  if (out_h == src.rows() && out_w == src.cols()) return src;

  auto coords = [](Index out, Index in, std::vector<Index>& i0, std::vector<double>& w) {
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    i0.resize(static_cast<std::size_t>(out));
    w.resize(static_cast<std::size_t>(out));
    for (Index o = 0; o < out; ++o) {
      const double s = std::clamp((static_cast<double>(o) + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
      const auto lo = std::min<Index>(static_cast<Index>(std::floor(s)), in - 1);
      i0[static_cast<std::size_t>(o)] = lo;
      w[static_cast<std::size_t>(o)] = s - static_cast<double>(lo);
    }
  };
  std::vector<Index> r0, c0;
  std::vector<double> rw, cw;
  coords(out_h, src.rows(), r0, rw);
  coords(out_w, src.cols(), c0, cw);

  Eigen::MatrixXd out(out_h, out_w);
  for (Index y = 0; y < out_h; ++y) {
    const Index ya = r0[static_cast<std::size_t>(y)];
    const Index yb = std::min<Index>(ya + 1, src.rows() - 1);
    const double wy = rw[static_cast<std::size_t>(y)];
    for (Index x = 0; x < out_w; ++x) {
      const Index xa = c0[static_cast<std::size_t>(x)];
      const Index xb = std::min<Index>(xa + 1, src.cols() - 1);
      const double wx = cw[static_cast<std::size_t>(x)];
      const double top = (1.0 - wx) * src(ya, xa) + wx * src(ya, xb);
      const double bottom = (1.0 - wx) * src(yb, xa) + wx * src(yb, xb);
      out(y, x) = (1.0 - wy) * top + wy * bottom;
    }
  }
  return out;
}

ChannelImage to_image(const StreamMatrix& m, Index out_h, Index out_w, double flat_range) {
  if (m.values.size() == 0) throw std::invalid_argument("cannot render an empty stream matrix");
  if (!m.values.allFinite()) throw NumericError("stream matrix contains non-finite values");

  const double lo = m.values.minCoeff();
  const double hi = m.values.maxCoeff();
  Eigen::MatrixXd norm(m.streams(), m.samples());
  if (hi - lo > flat_range) {
    norm = ((m.values.transpose().array() - lo) / (hi - lo)).matrix();
  } else {
    norm.setConstant(0.5);
  }

  ChannelImage img;
  img.pixels = resize_bilinear(norm, out_h, out_w);
  const auto pairs = m.pairs();
  img.source_pair = pairs.size() == 1 ? pairs.front() : -1;
  return img;
}

GaborBank::GaborBank(GaborParams params) : params_(params) {
  if (params_.n_scales < 1 || params_.n_orientations < 1) {
    throw std::invalid_argument("gabor bank needs at least one scale and orientation");
  }
  if (params_.kernel_size < 1 || params_.kernel_size % 2 == 0) {
    throw std::invalid_argument("gabor kernel size must be odd and positive");
  }
  if (!(params_.min_wavelength > 0.0) || !(params_.wavelength_step > 0.0) || !(params_.sigma_ratio > 0.0) ||
      !(params_.aspect_ratio > 0.0)) {
    throw std::invalid_argument("gabor wavelength, sigma and aspect parameters must be positive");
  }
  const Index r = params_.kernel_size / 2;
  for (Index s = 0; s < params_.n_scales; ++s) {
    const double lambda = wavelength(s);
    const double sigma = params_.sigma_ratio * lambda;
    const double gamma2 = params_.aspect_ratio * params_.aspect_ratio;
    for (Index o = 0; o < params_.n_orientations; ++o) {
      const double theta = orientation(o);
      const double ct = std::cos(theta), st = std::sin(theta);
      Eigen::MatrixXcd k(params_.kernel_size, params_.kernel_size);
      double envelope_sum = 0.0;
      for (Index y = -r; y <= r; ++y) {
        for (Index x = -r; x <= r; ++x) {
          const double xr = static_cast<double>(x) * ct + static_cast<double>(y) * st;
          const double yr = -static_cast<double>(x) * st + static_cast<double>(y) * ct;
          const double env = std::exp(-(xr * xr + gamma2 * yr * yr) / (2.0 * sigma * sigma));
          envelope_sum += env;
          k(y + r, x + r) = std::polar(env, 2.0 * kPi * xr / lambda);
        }
      }
      kernels_.push_back(k / envelope_sum);
    }
  }
}

double GaborBank::wavelength(Index scale) const {
  return params_.min_wavelength * std::pow(params_.wavelength_step, static_cast<double>(scale));
}

double GaborBank::orientation(Index o) const {
  return kPi * static_cast<double>(o) / static_cast<double>(params_.n_orientations);
}

GaborPlan::GaborPlan(const GaborBank& bank, Index rows, Index cols)
    : rows_(rows), cols_(cols), radius_(bank.params().kernel_size / 2) {
  const Index k = bank.params().kernel_size;
  if (rows < k || cols < k) {
    throw std::invalid_argument("image smaller than the gabor kernel");
  }
  fft_rows_ = next_smooth(rows + 2 * radius_);
  fft_cols_ = next_smooth(cols + 2 * radius_);
  for (const auto& kern : bank.kernels()) {
    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(fft_rows_, fft_cols_);
    padded.topLeftCorner(k, k) = kern;
    fft2(padded, false);
    spectra_.push_back(std::move(padded));
  }
}

Eigen::MatrixXcd GaborPlan::image_spectrum(const Eigen::MatrixXd& pixels) const {
  if (pixels.rows() != rows_ || pixels.cols() != cols_) {
    throw std::invalid_argument("image size does not match the gabor plan");
  }
  Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(fft_rows_, fft_cols_);
  for (Index y = 0; y < rows_ + 2 * radius_; ++y) {
    const Index sy = reflect101(y - radius_, rows_);
    for (Index x = 0; x < cols_ + 2 * radius_; ++x) {
      padded(y, x) = pixels(sy, reflect101(x - radius_, cols_));
    }
  }
  fft2(padded, false);
  return padded;
}

Eigen::MatrixXd GaborPlan::response_magnitude(const Eigen::MatrixXcd& image_spectrum, Index kernel) const {
  Eigen::MatrixXcd prod = image_spectrum.cwiseProduct(spectra_.at(static_cast<std::size_t>(kernel)));
  // Only the cropped rows need the second pass.
  fft_cols(prod, true);
  fft_rows(prod, true, 2 * radius_, rows_);
  return prod.block(2 * radius_, 2 * radius_, rows_, cols_).cwiseAbs();
}

FeatureVector gabor_features(const ChannelImage& img, const GaborPlan& plan) {
  const Eigen::MatrixXcd spec = plan.image_spectrum(img.pixels);
  FeatureVector fv;
  fv.kind = FeatureKind::Gabor96;
  fv.pair = img.source_pair;
  fv.values.resize(2 * plan.kernel_count());
  for (Index i = 0; i < plan.kernel_count(); ++i) {
    const Eigen::MatrixXd mag = plan.response_magnitude(spec, i);
    const double mean = mag.mean();
    const double var = (mag.array() - mean).square().mean();
    fv.values(2 * i) = mean;
    fv.values(2 * i + 1) = std::sqrt(std::max(var, 0.0));
  }
  return fv;
}

FeatureVector gabor_features(const ChannelImage& img, const GaborBank& bank) {
  return gabor_features(img, GaborPlan(bank, img.height(), img.width()));
}

Eigen::MatrixXd sift_descriptors(const ChannelImage& img, const DenseSiftParams& params) {
  const Index H = img.height(), W = img.width();
  if (H < 32 || W < 32) throw std::invalid_argument("image must be at least 32x32 for dense SIFT");
  if (params.patch < 4 || params.patch % 4 != 0 || params.stride < 1) {
    throw std::invalid_argument("patch must be a positive multiple of 4 and stride positive");
  }
  const auto& I = img.pixels;
  Eigen::MatrixXd mag(H, W), ang(H, W);
  for (Index y = 0; y < H; ++y) {
    for (Index x = 0; x < W; ++x) {
      const double gx = 0.5 * (I(y, std::min(x + 1, W - 1)) - I(y, std::max<Index>(x - 1, 0)));
      const double gy = 0.5 * (I(std::min(y + 1, H - 1), x) - I(std::max<Index>(y - 1, 0), x));
      mag(y, x) = std::hypot(gx, gy);
      double a = std::atan2(gy, gx);
      if (a < 0.0) a += 2.0 * kPi;
      ang(y, x) = a;
    }
  }

  const Index P = params.patch, cell = P / 4;
  const double sigma = 0.5 * static_cast<double>(P);
  const double center = 0.5 * static_cast<double>(P - 1);
  std::vector<Eigen::VectorXd> rows;
  for (Index y0 = 0; y0 + P <= H; y0 += params.stride) {
    for (Index x0 = 0; x0 + P <= W; x0 += params.stride) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(kSiftDims);
      for (Index py = 0; py < P; ++py) {
        for (Index px = 0; px < P; ++px) {
          const double m = mag(y0 + py, x0 + px);
          if (m == 0.0) continue;
          const double dy = static_cast<double>(py) - center, dx = static_cast<double>(px) - center;
          const double w = m * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
          const double b = ang(y0 + py, x0 + px) / (2.0 * kPi / 8.0);
          const auto b0 = static_cast<Index>(std::floor(b)) % 8;
          const Index b1 = (b0 + 1) % 8;
          const double frac = b - std::floor(b);
          const Index base = ((py / cell) * 4 + (px / cell)) * 8;
          d(base + b0) += w * (1.0 - frac);
          d(base + b1) += w * frac;
        }
      }
      const double n = d.norm();
      if (n > 1e-12) {
        d /= n;
        d = d.cwiseMin(0.2);
        const double n2 = d.norm();
        if (n2 > 0.0) d /= n2;
      }
      rows.push_back(std::move(d));
    }
  }
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), kSiftDims);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = rows[i].transpose();
  return out;
}

std::vector<Index> assign_nearest(const Eigen::MatrixXd& descs, const Eigen::MatrixXd& centroids) {
  if (descs.rows() > 0 && descs.cols() != centroids.cols()) {
    throw std::invalid_argument("descriptor and centroid dimensions differ");
  }
  std::vector<Index> out(static_cast<std::size_t>(descs.rows()));
  for (Index i = 0; i < descs.rows(); ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < centroids.rows(); ++j) {
      const double dist = (descs.row(i) - centroids.row(j)).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

namespace {

Index count_distinct_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
  }
  std::sort(rows.begin(), rows.end());
  return static_cast<Index>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

} // namespace

Codebook train_codebook(const Eigen::MatrixXd& descs, Index k, std::uint64_t seed, const KMeansOptions& opts) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!descs.allFinite()) throw NumericError("descriptors contain non-finite values");
  if (count_distinct_rows(descs) < k) {
    throw std::invalid_argument("k-means needs at least k distinct descriptors");
  }
  const Index n = descs.rows();
  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  Eigen::MatrixXd centroids(k, descs.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centroids.row(0) = descs.row(pick(rng));
  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (descs.row(i) - centroids.row(0)).squaredNorm();
  for (Index c = 1; c < k; ++c) {
    std::uniform_real_distribution<double> u(0.0, d2.sum());
    const double target = u(rng);
    double acc = 0.0;
    Index chosen = -1;
    for (Index i = 0; i < n; ++i) {
      if (d2(i) <= 0.0) continue;
      chosen = i;
      acc += d2(i);
      if (acc >= target) break;
    }
    centroids.row(c) = descs.row(chosen);
    for (Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (descs.row(i) - centroids.row(c)).squaredNorm());
  }

  Codebook cb;
  cb.seed = seed;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto assign = assign_nearest(descs, centroids);
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) inertia += (descs.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
    const bool converged = !cb.inertia_history.empty() &&
                           cb.inertia_history.back() - inertia <= opts.tolerance * cb.inertia_history.back();
    cb.inertia_history.push_back(inertia);
    cb.iterations = it + 1;
    if (converged) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, descs.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Index i = 0; i < n; ++i) {
      const Index a = assign[static_cast<std::size_t>(i)];
      sums.row(a) += descs.row(i);
      ++counts(a);
    }
    for (Index c = 0; c < k; ++c) {
      if (counts(c) > 0) centroids.row(c) = sums.row(c) / static_cast<double>(counts(c));
    }
  }
  cb.centroids = std::move(centroids);
  return cb;
}

FeatureVector bow_quantize(const Eigen::MatrixXd& descs, const Codebook& cb, Index pair) {
  if (cb.size() == 0) throw std::invalid_argument("codebook is not trained");
  FeatureVector fv;
  fv.kind = FeatureKind::BowSift48;
  fv.pair = pair;
  fv.values = Eigen::VectorXd::Zero(cb.size());
  if (descs.rows() == 0) {
    fv.degenerate = true;
    return fv;
  }
  for (Index a : assign_nearest(descs, cb.centroids)) fv.values(a) += 1.0;
  fv.values /= static_cast<double>(descs.rows());
  return fv;
}

} // namespace csisense
