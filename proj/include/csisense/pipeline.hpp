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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csisense/denoise.hpp"
#include "csisense/features.hpp"
#include "csisense/learn.hpp"

namespace csisense {

// Every knob between a raw trace and a trained model.
struct PipelineConfig {
  std::string name = "svd120-4svm";
  double target_rate = 1000.0;
  int filter_order = 5;
  double cutoff_hz = 50.0;
  double window_seconds = 0.3;
  bool denoise = true;
  SvdMode svd;
  bool normalize_before_denoise = true;
  Index image_height = 432;
  Index image_width = 576;
  GaborParams gabor;
  DenseSiftParams sift;
  FeatureKind kind = FeatureKind::Gabor96;
  FusionMode fusion = FusionMode::Late;
  double reg_c = 1.0;
  Index codebook_size = 48;

  FusionOptions fusion_options(std::uint64_t seed) const;
};

// "none-4svm", "svd30-1svm", "svd30-4svm", "svd120-1svm", "svd120-4svm", each
// optionally suffixed with "-fast" (72x54 images, 9-pixel Gabor kernels).
PipelineConfig pipeline_preset(std::string_view name);
void apply_fast_preset(PipelineConfig& cfg);

nlohmann::json to_json(const PipelineConfig& cfg);
// Missing keys keep the defaults of the preset named by "name" (if present).
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t config_hash(const PipelineConfig& cfg);
std::string hex64(std::uint64_t v);

enum class Stage { Raw, Preprocessed, Denoised };
Stage stage_from_string(const std::string& s);

// |gain| of every frame without resampling.
StreamMatrix amplitude_matrix(const CsiTrace& trace);
// interpolate -> lowpass -> normalize, with the denoise step placed per config.
StreamMatrix preprocess_trace(const CsiTrace& trace, const PipelineConfig& cfg);
StreamMatrix run_stage(const CsiTrace& trace, const PipelineConfig& cfg, Stage stage);

// Renders each Tx-Rx pair block and extracts the configured descriptors.
class FeatureExtractor {
public:
  explicit FeatureExtractor(PipelineConfig cfg);

  const PipelineConfig& config() const { return cfg_; }
  std::vector<ChannelImage> render(const StreamMatrix& m) const;
  std::vector<PairObservation> observe(const StreamMatrix& processed) const;
  std::vector<PairObservation> observe(const CsiTrace& trace) const;

private:
  PipelineConfig cfg_;
  GaborBank bank_;
  GaborPlan plan_;
};

} // namespace csisense
