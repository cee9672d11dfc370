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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csisense/io.hpp"
#include "csisense/learn.hpp"
#include "csisense/pipeline.hpp"
#include "csisense/synth.hpp"

namespace csisense {

// "kfold[:k]", "leave-group-out[:field]", "leave-room-out", "two-stage[:k]",
// "train-subset-scaling[:field]". Throws UsageError on anything else.
Protocol parse_protocol(const std::string& text);

// Writes traces/ and manifest.json under out_dir.
DatasetManifest cmd_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

// Loads every manifest trace and extracts per-pair observations. Traces are
// processed on `jobs` threads; cache_dir, when set, memoizes observations by
// trace content and pipeline settings.
std::vector<Sample> load_samples(const DatasetManifest& manifest, const std::filesystem::path& base_dir,
                                 const PipelineConfig& cfg, int jobs = 1,
                                 const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

struct RunRequest {
  std::filesystem::path manifest;
  PipelineConfig pipeline;
  std::string protocol;
  std::string target = "action";
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  std::optional<std::filesystem::path> cache_dir;
  std::string created;  // report stamp; empty means current UTC time
};

// Writes report.txt and confusion.pgm under out_dir and returns the report text.
std::string cmd_run(const RunRequest& req, std::ostream& log);

// Grayscale image of one processing stage of a trace, all pairs stacked.
void cmd_plot(const std::filesystem::path& trace_path, Stage stage, const std::filesystem::path& out_image,
              const PipelineConfig& cfg);

// Summary of a manifest (label counts) or a trace file (shape and amplitude stats).
void cmd_inspect(const std::filesystem::path& path, std::ostream& out);

} // namespace csisense
