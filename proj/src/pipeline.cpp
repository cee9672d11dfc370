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

#include "csisense/pipeline.hpp"

#include <cstdio>
#include <stdexcept>

namespace csisense {

FusionOptions PipelineConfig::fusion_options(std::uint64_t seed) const {
  FusionOptions o;
  o.mode = fusion;
  o.kind = kind;
  o.svm.reg_c = reg_c;
  o.svm.seed = seed;
  o.codebook_size = codebook_size;
  return o;
}

void apply_fast_preset(PipelineConfig& cfg) {
  cfg.image_height = 54;
  cfg.image_width = 72;
  cfg.gabor.kernel_size = 9;
}

PipelineConfig pipeline_preset(std::string_view name) {
  std::string base(name);
  bool fast = false;
  if (base.size() > 5 && base.ends_with("-fast")) {
    fast = true;
    base.resize(base.size() - 5);
  }
  PipelineConfig cfg;
  cfg.name = std::string(name);
  if (base == "none-4svm" || base == "none-1svm") {
    cfg.denoise = false;
    cfg.fusion = base == "none-4svm" ? FusionMode::Late : FusionMode::Early;
  } else if (base == "svd30-1svm" || base == "svd30-4svm" || base == "svd120-1svm" || base == "svd120-4svm") {
    cfg.denoise = true;
    cfg.svd.scope = base.starts_with("svd30") ? SvdScope::PerPair30 : SvdScope::Stacked120;
    cfg.fusion = base.ends_with("1svm") ? FusionMode::Early : FusionMode::Late;
  } else {
    throw std::invalid_argument("unknown pipeline preset '" + std::string(name) + "'");
  }
  if (fast) apply_fast_preset(cfg);
  return cfg;
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["target_rate"] = c.target_rate;
  j["filter_order"] = c.filter_order;
  j["cutoff_hz"] = c.cutoff_hz;
  j["window_seconds"] = c.window_seconds;
  j["denoise"] = c.denoise;
  j["svd_scope"] = c.svd.scope == SvdScope::PerPair30 ? "per-pair" : "stacked";
  j["svd_removed_components"] = c.svd.removed_components;
  j["normalize_before_denoise"] = c.normalize_before_denoise;
  j["image_height"] = c.image_height;
  j["image_width"] = c.image_width;
  j["gabor"] = {{"scales", c.gabor.n_scales},
                {"orientations", c.gabor.n_orientations},
                {"kernel_size", c.gabor.kernel_size},
                {"min_wavelength", c.gabor.min_wavelength},
                {"wavelength_step", c.gabor.wavelength_step},
                {"sigma_ratio", c.gabor.sigma_ratio},
                {"aspect_ratio", c.gabor.aspect_ratio}};
  j["sift"] = {{"stride", c.sift.stride}, {"patch", c.sift.patch}};
  j["features"] = c.kind == FeatureKind::Gabor96 ? "gabor" : "bow-sift";
  j["fusion"] = c.fusion == FusionMode::Early ? "early" : "late";
  j["reg_c"] = c.reg_c;
  j["codebook_size"] = c.codebook_size;
  return j;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("pipeline config must be a JSON object");
  PipelineConfig c = j.contains("name") ? pipeline_preset(j.at("name").get<std::string>()) : PipelineConfig{};
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
  };
  get("target_rate", c.target_rate);
  get("filter_order", c.filter_order);
  get("cutoff_hz", c.cutoff_hz);
  get("window_seconds", c.window_seconds);
  get("denoise", c.denoise);
  if (j.contains("svd_scope")) {
    const auto s = j.at("svd_scope").get<std::string>();
    if (s == "per-pair") c.svd.scope = SvdScope::PerPair30;
    else if (s == "stacked") c.svd.scope = SvdScope::Stacked120;
    else throw std::invalid_argument("svd_scope must be 'per-pair' or 'stacked'");
  }
  get("svd_removed_components", c.svd.removed_components);
  get("normalize_before_denoise", c.normalize_before_denoise);
  get("image_height", c.image_height);
  get("image_width", c.image_width);
  if (j.contains("gabor")) {
    const auto& g = j.at("gabor");
    if (g.contains("scales")) c.gabor.n_scales = g.at("scales").get<Index>();
    if (g.contains("orientations")) c.gabor.n_orientations = g.at("orientations").get<Index>();
    if (g.contains("kernel_size")) c.gabor.kernel_size = g.at("kernel_size").get<Index>();
    if (g.contains("min_wavelength")) c.gabor.min_wavelength = g.at("min_wavelength").get<double>();
    if (g.contains("wavelength_step")) c.gabor.wavelength_step = g.at("wavelength_step").get<double>();
    if (g.contains("sigma_ratio")) c.gabor.sigma_ratio = g.at("sigma_ratio").get<double>();
    if (g.contains("aspect_ratio")) c.gabor.aspect_ratio = g.at("aspect_ratio").get<double>();
  }
  if (j.contains("sift")) {
    const auto& s = j.at("sift");
    if (s.contains("stride")) c.sift.stride = s.at("stride").get<Index>();
    if (s.contains("patch")) c.sift.patch = s.at("patch").get<Index>();
  }
  if (j.contains("features")) {
    const auto f = j.at("features").get<std::string>();
    if (f == "gabor") c.kind = FeatureKind::Gabor96;
    else if (f == "bow-sift") c.kind = FeatureKind::BowSift48;
    else throw std::invalid_argument("features must be 'gabor' or 'bow-sift'");
  }
  if (j.contains("fusion")) {
    const auto f = j.at("fusion").get<std::string>();
    if (f == "early") c.fusion = FusionMode::Early;
    else if (f == "late") c.fusion = FusionMode::Late;
    else throw std::invalid_argument("fusion must be 'early' or 'late'");
  }
  get("reg_c", c.reg_c);
  get("codebook_size", c.codebook_size);
  if (!(c.reg_c > 0.0)) throw std::invalid_argument("reg_c must be positive");
  if (c.image_height < 1 || c.image_width < 1) throw std::invalid_argument("image size must be positive");
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const PipelineConfig& cfg) { return fnv1a64(to_json(cfg).dump()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Stage stage_from_string(const std::string& s) {
  if (s == "raw") return Stage::Raw;
  if (s == "preprocessed") return Stage::Preprocessed;
  if (s == "denoised") return Stage::Denoised;
  throw std::invalid_argument("unknown stage '" + s + "' (expected raw, preprocessed or denoised)");
}

StreamMatrix amplitude_matrix(const CsiTrace& trace) {
  trace.validate();
  if (trace.frames.empty()) throw std::invalid_argument("trace has no frames");
  const Index P = trace.pairs(), S = trace.subcarriers();
  StreamMatrix m;
  m.rate = trace.meta.nominal_rate;
  m.values.resize(static_cast<Index>(trace.frames.size()), P * S);
  for (Index p = 0; p < P; ++p) {
    for (Index s = 0; s < S; ++s) m.stream_map.push_back({p, s});
  }
  for (std::size_t t = 0; t < trace.frames.size(); ++t) {
    const auto& g = trace.frames[t].gains;
    for (Index p = 0; p < P; ++p) {
      for (Index s = 0; s < S; ++s) m.values(static_cast<Index>(t), p * S + s) = std::abs(g(p, s));
    }
  }
  return m;
}

namespace {

StreamMatrix run_pipeline(const CsiTrace& trace, const PipelineConfig& cfg, bool with_denoise) {
  StreamMatrix m = interpolate(trace, cfg.target_rate);
  m = lowpass(m, cfg.filter_order, cfg.cutoff_hz);
  if (with_denoise && !cfg.normalize_before_denoise) m = remove_background(m, cfg.svd);
  m = normalize(m, cfg.window_seconds);
  if (with_denoise && cfg.normalize_before_denoise) m = remove_background(m, cfg.svd);
  return m;
}

} // namespace

StreamMatrix preprocess_trace(const CsiTrace& trace, const PipelineConfig& cfg) {
  return run_pipeline(trace, cfg, cfg.denoise);
}

StreamMatrix run_stage(const CsiTrace& trace, const PipelineConfig& cfg, Stage stage) {
  switch (stage) {
    case Stage::Raw: return amplitude_matrix(trace);
    case Stage::Preprocessed: return run_pipeline(trace, cfg, false);
    case Stage::Denoised: return run_pipeline(trace, cfg, true);
  }
  throw std::invalid_argument("unknown stage");
}

FeatureExtractor::FeatureExtractor(PipelineConfig cfg)
    : cfg_(std::move(cfg)), bank_(cfg_.gabor), plan_(bank_, cfg_.image_height, cfg_.image_width) {}

std::vector<ChannelImage> FeatureExtractor::render(const StreamMatrix& m) const {
  std::vector<ChannelImage> out;
  for (Index p : m.pairs()) out.push_back(to_image(m.pair_block(p), cfg_.image_height, cfg_.image_width));
  return out;
}

std::vector<PairObservation> FeatureExtractor::observe(const StreamMatrix& processed) const {
  std::vector<PairObservation> out;
  for (const auto& img : render(processed)) {
    PairObservation obs;
    if (cfg_.kind == FeatureKind::Gabor96) {
      obs.gabor = gabor_features(img, plan_).values;
    } else {
      obs.sift = sift_descriptors(img, cfg_.sift);
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<PairObservation> FeatureExtractor::observe(const CsiTrace& trace) const {
  return observe(preprocess_trace(trace, cfg_));
}

} // namespace csisense
