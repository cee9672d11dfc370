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
#include <vector>

#include <Eigen/Core>

#include "csisense/preprocess.hpp"

namespace csisense {

// Grayscale image, rows are streams (y) and columns are time (x), pixels in [0, 1].
struct ChannelImage {
  Eigen::MatrixXd pixels;
  Index source_pair = 0;

  Index height() const { return pixels.rows(); }
  Index width() const { return pixels.cols(); }
};

// Min-max normalized with streams on the vertical axis, then bilinearly
// resized with half-pixel centers to out_h x out_w. Input whose value range is at most
// `flat_range` counts as constant and maps to 0.5.
ChannelImage to_image(const StreamMatrix& m, Index out_h, Index out_w, double flat_range = 0.0);

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, Index out_h, Index out_w);

enum class FeatureKind { Gabor96, BowSift48 };

struct FeatureVector {
  Eigen::VectorXd values;
  FeatureKind kind = FeatureKind::Gabor96;
  Index pair = 0;
  bool degenerate = false;  // set when quantizing an empty descriptor list
};

struct GaborParams {
  Index n_scales = 8;
  Index n_orientations = 6;
  Index kernel_size = 15;
  double min_wavelength = 4.0;  // pixels
  double wavelength_step = 1.4142135623730951;
  double sigma_ratio = 0.56;  // sigma = ratio * wavelength
  double aspect_ratio = 0.5;
};

// Plane wave times Gaussian envelope, one kernel per (scale, orientation) in
// scale-major order. Kernels are indexed [row = y offset + r, col = x offset + r].
class GaborBank {
public:
  explicit GaborBank(GaborParams params = {});

  const GaborParams& params() const { return params_; }
  const std::vector<Eigen::MatrixXcd>& kernels() const { return kernels_; }
  Index size() const { return static_cast<Index>(kernels_.size()); }
  Index feature_length() const { return 2 * size(); }

  double wavelength(Index scale) const;
  double orientation(Index orientation) const;

private:
  GaborParams params_;
  std::vector<Eigen::MatrixXcd> kernels_;
};

// Kernel spectra precomputed for one image size; reusable across images.
class GaborPlan {
public:
  GaborPlan(const GaborBank& bank, Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  // |image * kernel_i| with same-size output and reflect-101 padding.
  Eigen::MatrixXd response_magnitude(const Eigen::MatrixXcd& image_spectrum, Index kernel) const;
  Eigen::MatrixXcd image_spectrum(const Eigen::MatrixXd& pixels) const;
  Index kernel_count() const { return static_cast<Index>(spectra_.size()); }

private:
  Index rows_, cols_, radius_, fft_rows_, fft_cols_;
  std::vector<Eigen::MatrixXcd> spectra_;
};

// Per kernel (mean, population std) of the response magnitude: 2 * bank.size() values.
FeatureVector gabor_features(const ChannelImage& img, const GaborBank& bank);
FeatureVector gabor_features(const ChannelImage& img, const GaborPlan& plan);

inline constexpr Index kSiftDims = 128;

struct DenseSiftParams {
  Index stride = 8;
  Index patch = 16;
};

// One 128-dim row per grid position: 4x4 cells times 8 orientation bins,
// Unit L2 norm, with entries clamped at 0.2 before a second normalization.
Eigen::MatrixXd sift_descriptors(const ChannelImage& img, const DenseSiftParams& params = {});

struct Codebook {
  Eigen::MatrixXd centroids;  // k x dims
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<double> inertia_history;

  Index size() const { return centroids.rows(); }
};

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // relative inertia improvement
};

// k-means++ seeding followed by Lloyd iterations on the rows of `descs`.
Codebook train_codebook(const Eigen::MatrixXd& descs, Index k, std::uint64_t seed, const KMeansOptions& opts = {});

// Nearest centroid (ties to the lowest index) of each row.
std::vector<Index> assign_nearest(const Eigen::MatrixXd& descs, const Eigen::MatrixXd& centroids);

// L1-normalized histogram of nearest-centroid assignments.
FeatureVector bow_quantize(const Eigen::MatrixXd& descs, const Codebook& cb, Index pair = 0);

} // namespace csisense
