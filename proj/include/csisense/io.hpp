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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csisense/csi_model.hpp"
#include "csisense/learn.hpp"

namespace csisense {

// Binary trace layout, all little-endian:
//   char[4] "CSIT" | u32 version | u32 pairs | u32 subcarriers | u64 frame_count | f64 nominal_rate
//   then per frame: f64 timestamp, pairs*subcarriers x (f64 re, f64 im), pair-major.
inline constexpr std::uint32_t kTraceFormatVersion = 1;
inline constexpr std::size_t kTraceHeaderBytes = 4 + 4 + 4 + 4 + 8 + 8;

std::string encode_trace(const CsiTrace& trace);
CsiTrace decode_trace(const std::string& bytes);
void write_trace_file(const std::filesystem::path& path, const CsiTrace& trace);
CsiTrace read_trace_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string trace_path;  // relative to the manifest directory unless absolute
  std::string action_label;
  std::string person_label;
  std::string room_label;
  std::string location_label;
  std::vector<std::string> split_tags;
};

inline constexpr int kManifestFormatVersion = 1;

struct DatasetManifest {
  int format_version = kManifestFormatVersion;
  std::vector<ManifestEntry> entries;

  void validate() const;
};

std::string encode_manifest(const DatasetManifest& m);
DatasetManifest decode_manifest(const std::string& text);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Write to a sibling temporary file, then rename over the target.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

// 8-bit binary PGM (P5); pixels in [0, 1] are scaled to 0..255.
std::string encode_pgm(const Eigen::MatrixXd& pixels);
Eigen::MatrixXd decode_pgm(const std::string& bytes);
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& pixels);

// Row-normalized confusion matrix as an image, `cell` pixels per entry.
Eigen::MatrixXd confusion_image(const EvalReport& r, Index cell = 16);

struct ReportContext {
  std::string pipeline;
  std::string config_hash;
  std::string target;
  std::string dataset;
  std::string created;  // wall-clock stamp; the only non-deterministic field
};

inline constexpr int kReportFormatVersion = 1;

// Line-oriented "key value..." text, one record per line.
std::string format_report(const EvalReport& r, const ReportContext& ctx);

} // namespace csisense
