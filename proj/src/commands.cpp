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

#include "csisense/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <ctime>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "csisense/error.hpp"

namespace csisense {

namespace {

std::pair<std::string, std::string> split_colon(const std::string& text) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) return {text, ""};
  return {text.substr(0, pos), text.substr(pos + 1)};
}

int parse_k(const std::string& arg, int fallback) {
  if (arg.empty()) return fallback;
  try {
    std::size_t used = 0;
    const int k = std::stoi(arg, &used);
    if (used != arg.size() || k < 2) throw UsageError("");
    return k;
  } catch (const std::exception&) {
    throw UsageError("fold count must be an integer >= 2, got '" + arg + "'");
  }
}

LabelField parse_field(const std::string& arg, LabelField fallback) {
  if (arg.empty()) return fallback;
  try {
    return label_field_from_string(arg);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
}

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

void put_doubles(std::string& out, const double* p, Index n) {
  out.append(reinterpret_cast<const char*>(p), static_cast<std::size_t>(n) * sizeof(double));
}

std::uint64_t take_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw DataError("feature cache entry truncated");
  std::uint64_t v;
  std::memcpy(&v, in.data() + pos, 8);
  pos += 8;
  return v;
}

void take_doubles(const std::string& in, std::size_t& pos, double* p, Index n) {
  const std::size_t bytes = static_cast<std::size_t>(n) * sizeof(double);
  if (pos + bytes > in.size()) throw DataError("feature cache entry truncated");
  std::memcpy(p, in.data() + pos, bytes);
  pos += bytes;
}

std::string encode_observations(const std::vector<PairObservation>& obs) {
  std::string out = "CSIF";
  put_u64(out, obs.size());
  for (const auto& o : obs) {
    put_u64(out, static_cast<std::uint64_t>(o.gabor.size()));
    put_doubles(out, o.gabor.data(), o.gabor.size());
    put_u64(out, static_cast<std::uint64_t>(o.sift.rows()));
    put_u64(out, static_cast<std::uint64_t>(o.sift.cols()));
    put_doubles(out, o.sift.data(), o.sift.size());
  }
  return out;
}

std::vector<PairObservation> decode_observations(const std::string& bytes) {
  if (bytes.compare(0, 4, "CSIF") != 0) throw DataError("bad feature cache entry");
  std::size_t pos = 4;
  std::vector<PairObservation> obs(take_u64(bytes, pos));
  for (auto& o : obs) {
    o.gabor.resize(static_cast<Index>(take_u64(bytes, pos)));
    take_doubles(bytes, pos, o.gabor.data(), o.gabor.size());
    const auto rows = static_cast<Index>(take_u64(bytes, pos));
    const auto cols = static_cast<Index>(take_u64(bytes, pos));
    o.sift.resize(rows, cols);
    take_doubles(bytes, pos, o.sift.data(), o.sift.size());
  }
  if (pos != bytes.size()) throw DataError("bad feature cache entry");
  return obs;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

} // namespace

Protocol parse_protocol(const std::string& text) {
  if (text.empty()) throw UsageError("protocol name is empty");
  const auto [name, arg] = split_colon(text);
  if (name == "kfold") return KFold{parse_k(arg, 10)};
  if (name == "two-stage") return TwoStage{parse_k(arg, 10)};
  if (name == "leave-group-out") return LeaveGroupOut{parse_field(arg, LabelField::Room)};
  if (name == "leave-room-out" && arg.empty()) return LeaveGroupOut{LabelField::Room};
  if (name == "leave-location-out" && arg.empty()) return LeaveGroupOut{LabelField::Location};
  if (name == "train-subset-scaling") return TrainSubsetScaling{parse_field(arg, LabelField::Room)};
  throw UsageError("unknown protocol '" + text + "'");
}

DatasetManifest cmd_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "traces", ec);
  if (ec) throw DataError("cannot create " + (out_dir / "traces").string() + ": " + ec.message());

  const auto jobs = plan_traces(cfg);
  DatasetManifest manifest;
  if (jobs.empty()) log << "warning: config yields no traces; writing an empty manifest\n";
  for (const auto& job : jobs) {
    write_trace_file(out_dir / job.entry.trace_path, generate(job));
    manifest.entries.push_back(job.entry);
  }
  write_manifest(out_dir / "manifest.json", manifest);
  log << "wrote " << manifest.entries.size() << " traces to " << out_dir.string() << "\n";
  return manifest;
}

std::vector<Sample> load_samples(const DatasetManifest& manifest, const std::filesystem::path& base_dir,
                                 const PipelineConfig& cfg, int jobs,
                                 const std::optional<std::filesystem::path>& cache_dir) {
  const std::string settings = to_json(cfg).dump();
  if (cache_dir) std::filesystem::create_directories(*cache_dir);

  std::vector<Sample> samples(manifest.entries.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    const FeatureExtractor extractor(cfg);
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      try {
        const auto& e = manifest.entries[i];
        const std::filesystem::path path =
            std::filesystem::path(e.trace_path).is_absolute() ? std::filesystem::path(e.trace_path) : base_dir / e.trace_path;
        const std::string bytes = read_file(path);
        Sample& s = samples[i];
        s.action = e.action_label;
        s.person = e.person_label;
        s.room = e.room_label;
        s.location = e.location_label;

        std::filesystem::path cached;
        if (cache_dir) {
          cached = *cache_dir / (hex64(fnv1a64(bytes) ^ fnv1a64(settings)) + ".feat");
          if (std::filesystem::exists(cached)) {
            s.pairs = decode_observations(read_file(cached));
            continue;
          }
        }
        s.pairs = extractor.observe(decode_trace(bytes));
        if (cache_dir) atomic_write(cached, encode_observations(s.pairs));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = samples.size();
      }
    }
  };

  const int n = std::clamp(jobs, 1, 64);
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return samples;
}

std::string cmd_run(const RunRequest& req, std::ostream& log) {
  const Protocol protocol = parse_protocol(req.protocol);
  LabelField target;
  try {
    target = label_field_from_string(req.target);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }

  const std::string manifest_text = read_file(req.manifest);
  const DatasetManifest manifest = decode_manifest(manifest_text);
  if (manifest.entries.empty()) throw DataError("manifest has no entries");

  const auto samples = load_samples(manifest, req.manifest.parent_path(), req.pipeline, req.jobs, req.cache_dir);
  log << "extracted features for " << samples.size() << " traces\n";

  EvalReport report;
  try {
    report = cross_validate(samples, protocol, target, req.pipeline.fusion_options(req.seed), req.seed);
  } catch (const std::invalid_argument& ex) {
    throw DataError(ex.what());
  }
  report.check_consistency();

  ReportContext ctx;
  ctx.pipeline = req.pipeline.name;
  ctx.config_hash = hex64(config_hash(req.pipeline));
  ctx.target = req.target;
  ctx.dataset = hex64(fnv1a64(manifest_text)) + " " + std::to_string(manifest.entries.size());
  ctx.created = req.created.empty() ? utc_now() : req.created;
  const std::string text = format_report(report, ctx);

  std::error_code ec;
  std::filesystem::create_directories(req.out_dir, ec);
  if (ec) throw DataError("cannot create " + req.out_dir.string() + ": " + ec.message());
  atomic_write(req.out_dir / "report.txt", text);
  write_pgm(req.out_dir / "confusion.pgm", confusion_image(report));
  return text;
}

void cmd_plot(const std::filesystem::path& trace_path, Stage stage, const std::filesystem::path& out_image,
              const PipelineConfig& cfg) {
  const CsiTrace trace = read_trace_file(trace_path);
  const StreamMatrix m = run_stage(trace, cfg, stage);
  // Rounding residue of a flat signal is rendered flat instead of stretched to full contrast.
  const double flat = 1e-9 * amplitude_matrix(trace).values.cwiseAbs().maxCoeff();
  write_pgm(out_image, to_image(m, cfg.image_height, cfg.image_width, flat).pixels);
}

void cmd_inspect(const std::filesystem::path& path, std::ostream& out) {
  const std::string bytes = read_file(path);
  if (bytes.compare(0, 4, "CSIT") == 0) {
    const CsiTrace t = decode_trace(bytes);
    const StreamMatrix a = amplitude_matrix(t);
    out << "trace " << path.string() << "\n";
    out << "pairs " << t.pairs() << "\n";
    out << "subcarriers " << t.subcarriers() << "\n";
    out << "frames " << t.frames.size() << "\n";
    out << "nominal_rate " << t.meta.nominal_rate << "\n";
    out << "duration " << t.meta.duration << "\n";
    out << "amplitude_mean " << a.values.mean() << "\n";
    out << "amplitude_min " << a.values.minCoeff() << "\n";
    out << "amplitude_max " << a.values.maxCoeff() << "\n";
    return;
  }
  const DatasetManifest m = decode_manifest(bytes);
  out << "manifest " << path.string() << "\n";
  out << "format_version " << m.format_version << "\n";
  out << "entries " << m.entries.size() << "\n";
  for (const auto field : {LabelField::Action, LabelField::Person, LabelField::Room, LabelField::Location}) {
    std::map<std::string, int> counts;
    for (const auto& e : m.entries) {
      Sample s{e.action_label, e.person_label, e.room_label, e.location_label, {}};
      ++counts[label_of(s, field)];
    }
    out << to_string(field);
    for (const auto& [k, v] : counts) out << " " << k << "=" << v;
    out << "\n";
  }
}

} // namespace csisense
