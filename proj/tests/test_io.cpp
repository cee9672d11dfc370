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
#include <filesystem>
#include <set>
#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "csisense/commands.hpp"
#include "csisense/error.hpp"

using namespace csisense;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("csisense_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CsiTrace random_trace(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CsiTrace t;
  t.meta.nominal_rate = 800.0;
  for (int i = 0; i < 25; ++i) {
    CsiFrame f;
    f.timestamp = 0.00125 * i + (i == 3 ? 1e-7 : 0.0);
    f.gains.resize(3, 7);
    for (Index k = 0; k < f.gains.size(); ++k) f.gains.data()[k] = Complex(g(rng), g(rng));
    t.frames.push_back(f);
  }
  t.meta.duration = t.frames.back().timestamp;
  return t;
}

nlohmann::json synth_json(int reps, int actions = 6) {
  const std::vector<std::string> names = {"still", "walk-like", "run-like", "pick-up", "golf-swing", "jump"};
  nlohmann::json j = nlohmann::json::parse(R"({"seed": 3, "duration": 0.3,
    "channel": {"pairs": 2, "subcarriers": 4},
    "rooms": [{"name": "A", "static_paths": [{"delay_ns": 0, "gain": 10}]}]})");
  j["repetitions"] = reps;
  j["actions"] = std::vector<std::string>(names.begin(), names.begin() + actions);
  return j;
}

std::string tree_digest(const fs::path& root) {
  std::vector<std::string> parts;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    parts.push_back(fs::relative(e.path(), root).string() + ":" + hex64(fnv1a64(read_file(e.path()))));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += p + "\n";
  return out;
}

} // namespace

TEST_CASE("trace files round-trip bit for bit", "[io]") {
  const CsiTrace t = random_trace(1);
  const std::string bytes = encode_trace(t);
  CHECK(bytes.size() == kTraceHeaderBytes + 25 * (8 + 3 * 7 * 16));
  CHECK(bytes.compare(0, 4, "CSIT") == 0);
  const CsiTrace back = decode_trace(bytes);
  REQUIRE(back.frames.size() == t.frames.size());
  CHECK(back.meta.nominal_rate == 800.0);
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    CHECK(back.frames[i].timestamp == t.frames[i].timestamp);
    CHECK(back.frames[i].gains == t.frames[i].gains);
  }
  const fs::path dir = scratch("trace");
  write_trace_file(dir / "t.csit", t);
  CHECK(encode_trace(read_trace_file(dir / "t.csit")) == bytes);
}

TEST_CASE("corrupt trace files are data errors", "[io]") {
  const std::string bytes = encode_trace(random_trace(2));
  CHECK_THROWS_AS(decode_trace(bytes.substr(0, bytes.size() - 3)), DataError);
  CHECK_THROWS_AS(decode_trace(bytes + "x"), DataError);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_trace(bad), DataError);
  bad = bytes;
  bad[4] = 9;
  CHECK_THROWS_AS(decode_trace(bad), DataError);
  CHECK_THROWS_AS(read_file("/nonexistent/csisense/file"), DataError);
}

TEST_CASE("manifests round-trip and validate", "[io]") {
  DatasetManifest m;
  m.entries.push_back({"traces/a.csit", "walk", "p1", "A", "a", {"train"}});
  m.entries.push_back({"traces/b.csit", "jump", "p2", "B", "b", {}});
  const DatasetManifest back = decode_manifest(encode_manifest(m));
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].split_tags == std::vector<std::string>{"train"});
  CHECK(back.entries[1].location_label == "b");
  CHECK(encode_manifest(back) == encode_manifest(m));

  SECTION("duplicate paths") {
    m.entries[1].trace_path = m.entries[0].trace_path;
    CHECK_THROWS_AS(m.validate(), DataError);
  }
  SECTION("empty label") {
    m.entries[1].person_label.clear();
    CHECK_THROWS_AS(m.validate(), DataError);
  }
  SECTION("unknown version") {
    auto j = nlohmann::json::parse(encode_manifest(m));
    j["format_version"] = 99;
    CHECK_THROWS_AS(decode_manifest(j.dump()), DataError);
  }
  SECTION("malformed JSON") { CHECK_THROWS_AS(decode_manifest("{\"entries\": [}"), DataError); }
}

TEST_CASE("PGM images round-trip at 8 bits", "[io]") {
  Eigen::MatrixXd px(3, 5);
  px << 0, 0.25, 0.5, 0.75, 1, 1, 0, 1, 0, 1, 0.1, 0.2, 0.3, 0.4, 0.5;
  const std::string bytes = encode_pgm(px);
  CHECK(bytes.rfind("P5", 0) == 0);
  const Eigen::MatrixXd back = decode_pgm(bytes);
  CHECK(back.rows() == 3);
  CHECK((back - px).cwiseAbs().maxCoeff() <= 0.5 / 255.0 + 1e-12);
  CHECK_THROWS_AS(decode_pgm("P2\n1 1\n255\n0"), DataError);
}

TEST_CASE("report text has a stable line schema", "[io]") {
  EvalReport r;
  r.accuracy = 0.75;
  r.class_names = {"a", "b"};
  r.confusion.resize(2, 2);
  r.confusion << 2, 0, 1, 1;
  r.per_fold = {{"fold0", 0.5, 2}, {"fold1", 1.0, 2}};
  r.protocol = "kfold:2";
  r.seed = 4;
  r.extras = {{"location_accuracy", 0.9}};
  const std::string text = format_report(r, {"svd120-1svm", "00ff", "action", "abc 4", "2026-01-01T00:00:00Z"});
  CHECK(text ==
        "csisense-report 1\npipeline svd120-1svm\nconfig_hash 00ff\nprotocol kfold:2\ntarget action\n"
        "dataset abc 4\nseed 4\naccuracy 0.750000\nclasses a b\nconfusion a 2 0\nconfusion b 1 1\n"
        "fold fold0 0.500000 2\nfold fold1 1.000000 2\nextra location_accuracy 0.900000\n"
        "created 2026-01-01T00:00:00Z\n");
  const Eigen::MatrixXd img = confusion_image(r, 4);
  CHECK(img.rows() == 8);
  CHECK(img(0, 0) == 1.0);
  CHECK(img(5, 1) == 0.5);
}

TEST_CASE("atomic writes leave no temporaries", "[io]") {
  const fs::path dir = scratch("atomic");
  atomic_write(dir / "x.txt", "one");
  atomic_write(dir / "x.txt", "two");
  CHECK(read_file(dir / "x.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
}

TEST_CASE("pipeline configs serialize and hash", "[io]") {
  const PipelineConfig a = pipeline_preset("svd30-4svm-fast");
  CHECK(a.image_width == 72);
  CHECK(a.image_height == 54);
  CHECK(a.gabor.kernel_size == 9);
  CHECK(a.svd.scope == SvdScope::PerPair30);
  const PipelineConfig b = pipeline_config_from_json(to_json(a));
  CHECK(to_json(b) == to_json(a));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(pipeline_preset("svd30-4svm")));
  CHECK_THROWS(pipeline_preset("svd60-2svm"));
  CHECK_THROWS(pipeline_config_from_json(nlohmann::json{{"reg_c", -1.0}}));
  CHECK(pipeline_preset("none-4svm").denoise == false);
  CHECK(pipeline_preset("svd120-1svm").fusion == FusionMode::Early);
  CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("synth plans rooms x locations x subjects x actions x reps", "[io]") {
  const SynthConfig cfg = synth_config_from_json(synth_json(20));
  const auto jobs = plan_traces(cfg);
  CHECK(jobs.size() == 120);
  std::set<std::string> paths;
  for (const auto& j : jobs) paths.insert(j.entry.trace_path);
  CHECK(paths.size() == 120);
  CHECK(jobs.front().entry.location_label == "A");
  CHECK(plan_traces(synth_config_from_json(synth_json(0))).empty());
  const SynthConfig round = synth_config_from_json(to_json(cfg));
  CHECK(to_json(round) == to_json(cfg));
}

TEST_CASE("synth config errors", "[io]") {
  auto j = synth_json(2);
  j["actions"] = {"teleport"};
  CHECK_THROWS(synth_config_from_json(j));
  j = synth_json(2);
  j["repetitions"] = -1;
  CHECK_THROWS_AS(synth_config_from_json(j), DataError);
  j = synth_json(2);
  j["rooms"] = nlohmann::json::array();
  CHECK_THROWS_AS(synth_config_from_json(j), DataError);
  j = synth_json(2);
  j["rooms"][0].erase("static_paths");
  CHECK_THROWS_AS(synth_config_from_json(j), DataError);
}

TEST_CASE("protocol names", "[io]") {
  CHECK(std::get<KFold>(parse_protocol("kfold")).k == 10);
  CHECK(std::get<KFold>(parse_protocol("kfold:5")).k == 5);
  CHECK(std::get<LeaveGroupOut>(parse_protocol("leave-room-out")).group == LabelField::Room);
  CHECK(std::get<LeaveGroupOut>(parse_protocol("leave-location-out")).group == LabelField::Location);
  CHECK(std::get<LeaveGroupOut>(parse_protocol("leave-group-out:person")).group == LabelField::Person);
  CHECK(std::get<TwoStage>(parse_protocol("two-stage:4")).k == 4);
  CHECK(std::get<TrainSubsetScaling>(parse_protocol("train-subset-scaling")).group == LabelField::Room);
  CHECK_THROWS_AS(parse_protocol(""), UsageError);
  CHECK_THROWS_AS(parse_protocol("kfold:1"), UsageError);
  CHECK_THROWS_AS(parse_protocol("kfold:x"), UsageError);
  CHECK_THROWS_AS(parse_protocol("bootstrap"), UsageError);
  CHECK_THROWS_AS(parse_protocol("leave-group-out:colour"), UsageError);
}

TEST_CASE("synth command is deterministic and warns on empty plans", "[io]") {
  const SynthConfig cfg = synth_config_from_json(synth_json(2, 2));
  std::ostringstream log;
  const fs::path a = scratch("synth_a"), b = scratch("synth_b");
  const DatasetManifest m = cmd_synth(cfg, a, log);
  cmd_synth(cfg, b, log);
  CHECK(m.entries.size() == 4);
  CHECK(tree_digest(a) == tree_digest(b));
  CHECK(read_manifest(a / "manifest.json").entries.size() == 4);

  std::ostringstream warn;
  const DatasetManifest empty = cmd_synth(synth_config_from_json(synth_json(0)), scratch("synth_empty"), warn);
  CHECK(empty.entries.empty());
  CHECK(warn.str().find("warning") != std::string::npos);
}

TEST_CASE("inspect summarizes traces and manifests", "[io]") {
  const fs::path dir = scratch("inspect");
  std::ostringstream log;
  cmd_synth(synth_config_from_json(synth_json(1, 3)), dir, log);
  std::ostringstream m;
  cmd_inspect(dir / "manifest.json", m);
  CHECK(m.str().find("entries 3\n") != std::string::npos);
  CHECK(m.str().find("action pick-up=0") == std::string::npos);
  CHECK(m.str().find("action run-like=1 still=1 walk-like=1\n") != std::string::npos);
  std::ostringstream t;
  cmd_inspect(dir / "traces/A_A_subject_still_0.csit", t);
  CHECK(t.str().find("pairs 2\n") != std::string::npos);
  CHECK(t.str().find("frames 300\n") != std::string::npos);
}
