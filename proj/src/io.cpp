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

#include "csisense/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csisense/error.hpp"

namespace csisense {

namespace {

static_assert(std::endian::native == std::endian::little, "trace codec assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw DataError("trace file truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

} // namespace

std::string encode_trace(const CsiTrace& trace) {
  trace.validate();
  const auto P = static_cast<std::uint32_t>(trace.pairs());
  const auto S = static_cast<std::uint32_t>(trace.subcarriers());
  std::string out;
  out.reserve(kTraceHeaderBytes + trace.frames.size() * (8 + 16 * std::size_t{P} * S));
  out.append("CSIT", 4);
  put<std::uint32_t>(out, kTraceFormatVersion);
  put<std::uint32_t>(out, P);
  put<std::uint32_t>(out, S);
  put<std::uint64_t>(out, trace.frames.size());
  put<double>(out, trace.meta.nominal_rate);
  for (const auto& f : trace.frames) {
    put<double>(out, f.timestamp);
    for (Index p = 0; p < f.gains.rows(); ++p) {
      for (Index s = 0; s < f.gains.cols(); ++s) {
        put<double>(out, f.gains(p, s).real());
        put<double>(out, f.gains(p, s).imag());
      }
    }
  }
  return out;
}

CsiTrace decode_trace(const std::string& bytes) {
  if (bytes.size() < kTraceHeaderBytes || bytes.compare(0, 4, "CSIT") != 0) {
    throw DataError("not a CSIT trace file (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kTraceFormatVersion) throw DataError("unsupported trace version " + std::to_string(version));
  const auto P = take<std::uint32_t>(bytes, pos);
  const auto S = take<std::uint32_t>(bytes, pos);
  const auto n = take<std::uint64_t>(bytes, pos);
  const auto rate = take<double>(bytes, pos);
  const std::uint64_t frame_bytes = 8 + 16 * std::uint64_t{P} * S;
  if (bytes.size() != kTraceHeaderBytes + n * frame_bytes) {
    throw DataError("trace byte length does not match its header");
  }
  CsiTrace trace;
  trace.meta.nominal_rate = rate;
  trace.frames.resize(n);
  for (auto& f : trace.frames) {
    f.timestamp = take<double>(bytes, pos);
    f.gains.resize(P, S);
    for (Index p = 0; p < static_cast<Index>(P); ++p) {
      for (Index s = 0; s < static_cast<Index>(S); ++s) {
        const double re = take<double>(bytes, pos);
        const double im = take<double>(bytes, pos);
        f.gains(p, s) = Complex(re, im);
      }
    }
  }
  if (n > 0 && rate > 0.0) {
    trace.meta.duration = std::max(static_cast<double>(n) / rate, trace.frames.back().timestamp - trace.frames.front().timestamp);
  }
  trace.validate();
  return trace;
}

void write_trace_file(const std::filesystem::path& path, const CsiTrace& trace) { atomic_write(path, encode_trace(trace)); }

CsiTrace read_trace_file(const std::filesystem::path& path) { return decode_trace(read_file(path)); }

void DatasetManifest::validate() const {
  if (format_version != kManifestFormatVersion) {
    throw DataError("unsupported manifest version " + std::to_string(format_version));
  }
  std::set<std::string> paths;
  for (const auto& e : entries) {
    if (e.trace_path.empty()) throw DataError("manifest entry without trace path");
    if (!paths.insert(e.trace_path).second) throw DataError("duplicate trace path " + e.trace_path);
    if (e.action_label.empty() || e.person_label.empty() || e.room_label.empty() || e.location_label.empty()) {
      throw DataError("manifest entry " + e.trace_path + " has an empty label");
    }
  }
}

std::string encode_manifest(const DatasetManifest& m) {
  m.validate();
  nlohmann::json j;
  j["format_version"] = m.format_version;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : m.entries) {
    j["entries"].push_back({{"trace_path", e.trace_path},
                            {"action_label", e.action_label},
                            {"person_label", e.person_label},
                            {"room_label", e.room_label},
                            {"location_label", e.location_label},
                            {"split_tags", e.split_tags}});
  }
  return j.dump(1) + "\n";
}

DatasetManifest decode_manifest(const std::string& text) {
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.format_version = j.at("format_version").get<int>();
    for (const auto& e : j.at("entries")) {
      ManifestEntry me;
      me.trace_path = e.at("trace_path").get<std::string>();
      me.action_label = e.at("action_label").get<std::string>();
      me.person_label = e.at("person_label").get<std::string>();
      me.room_label = e.at("room_label").get<std::string>();
      me.location_label = e.value("location_label", me.room_label);
      me.split_tags = e.value("split_tags", std::vector<std::string>{});
      m.entries.push_back(std::move(me));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed manifest: ") + ex.what());
  }
  m.validate();
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) { atomic_write(path, encode_manifest(m)); }

DatasetManifest read_manifest(const std::filesystem::path& path) { return decode_manifest(read_file(path)); }

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_pgm(const Eigen::MatrixXd& pixels) {
  std::string out = "P5\n" + std::to_string(pixels.cols()) + " " + std::to_string(pixels.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(pixels.size()));
  for (Index y = 0; y < pixels.rows(); ++y) {
    for (Index x = 0; x < pixels.cols(); ++x) {
      const double v = std::isfinite(pixels(y, x)) ? std::clamp(pixels(y, x), 0.0, 1.0) : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  return out;
}

Eigen::MatrixXd decode_pgm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  Index w = 0, h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w < 1 || h < 1 || maxval != 255) throw DataError("unsupported PGM header");
  in.get();
  const auto start = static_cast<std::size_t>(in.tellg());
  if (bytes.size() != start + static_cast<std::size_t>(w * h)) throw DataError("PGM size mismatch");
  Eigen::MatrixXd img(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      img(y, x) = static_cast<unsigned char>(bytes[start + static_cast<std::size_t>(y * w + x)]) / 255.0;
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& pixels) { atomic_write(path, encode_pgm(pixels)); }

Eigen::MatrixXd confusion_image(const EvalReport& r, Index cell) {
  const Index n = r.confusion.rows();
  Eigen::MatrixXd img = Eigen::MatrixXd::Zero(std::max<Index>(n, 1) * cell, std::max<Index>(n, 1) * cell);
  for (Index i = 0; i < n; ++i) {
    const double row = std::max(r.confusion.row(i).sum(), 1);
    for (Index j = 0; j < n; ++j) img.block(i * cell, j * cell, cell, cell).setConstant(r.confusion(i, j) / row);
  }
  return img;
}

std::string format_report(const EvalReport& r, const ReportContext& ctx) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "csisense-report " << kReportFormatVersion << "\n";
  out << "pipeline " << ctx.pipeline << "\n";
  out << "config_hash " << ctx.config_hash << "\n";
  out << "protocol " << r.protocol << "\n";
  out << "target " << ctx.target << "\n";
  out << "dataset " << ctx.dataset << "\n";
  out << "seed " << r.seed << "\n";
  out << "accuracy " << r.accuracy << "\n";
  out << "classes";
  for (const auto& c : r.class_names) out << " " << c;
  out << "\n";
  for (Index i = 0; i < r.confusion.rows(); ++i) {
    out << "confusion " << r.class_names[static_cast<std::size_t>(i)];
    for (Index j = 0; j < r.confusion.cols(); ++j) out << " " << r.confusion(i, j);
    out << "\n";
  }
  for (const auto& f : r.per_fold) out << "fold " << f.name << " " << f.accuracy << " " << f.test_count << "\n";
  for (const auto& [k, v] : r.extras) out << "extra " << k << " " << v << "\n";
  out << "created " << ctx.created << "\n";
  return out.str();
}

} // namespace csisense
