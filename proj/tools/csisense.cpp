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

// csisense: synthesize CSI datasets and run activity-recognition experiments
// on them. Subcommands: synth, run, plot, inspect.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "csisense/commands.hpp"
#include "csisense/error.hpp"

namespace fs = std::filesystem;
using namespace csisense;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(path.string() + ": " + ex.what());
  }
}

// A preset name, optionally overridden key by key from a JSON file.
PipelineConfig resolve_pipeline(const std::string& preset, const std::string& config_path) {
  PipelineConfig cfg = pipeline_preset(preset);
  if (!config_path.empty()) {
    nlohmann::json j = to_json(cfg);
    j.merge_patch(read_json(config_path));
    cfg = pipeline_config_from_json(j);
  }
  return cfg;
}

std::optional<fs::path> cache_from_env() {
  const char* dir = std::getenv("CSISENSE_CACHE");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return fs::path(dir);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wi-Fi CSI activity sensing toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int jobs = 1;

  auto* synth = app.add_subcommand("synth", "generate a synthetic trace dataset");
  std::string synth_config, synth_out = "dataset";
  synth->add_option("--config", synth_config, "synthesis config (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", seed, "override the config seed");

  auto* run = app.add_subcommand("run", "evaluate a pipeline on a dataset");
  std::string manifest, preset = "svd120-4svm", run_config, protocol = "kfold:10", target = "action", run_out = ".";
  run->add_option("manifest", manifest, "dataset manifest")->required()->check(CLI::ExistingFile);
  run->add_option("--pipeline", preset, "pipeline preset");
  run->add_option("--config", run_config, "pipeline overrides (JSON)")->check(CLI::ExistingFile);
  run->add_option("--protocol", protocol, "kfold[:k], leave-room-out, leave-group-out[:field], two-stage[:k], "
                                          "train-subset-scaling[:field]");
  run->add_option("--target", target, "label to predict: action, person, room, location");
  run->add_option("--seed", seed, "fold and solver seed");
  run->add_option("--jobs", jobs, "feature extraction threads")->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "output directory for report.txt and confusion.pgm");

  auto* plot = app.add_subcommand("plot", "render one processing stage of a trace");
  std::string plot_trace, stage = "preprocessed", plot_out = "stage.pgm", plot_preset = "svd120-4svm", plot_config;
  plot->add_option("trace", plot_trace, "trace file")->required()->check(CLI::ExistingFile);
  plot->add_option("--stage", stage, "raw, preprocessed or denoised");
  plot->add_option("--out", plot_out, "output PGM");
  plot->add_option("--pipeline", plot_preset, "pipeline preset");
  plot->add_option("--config", plot_config, "pipeline overrides (JSON)")->check(CLI::ExistingFile);
  plot->add_option("--seed", seed, "unused; accepted for uniformity");

  auto* inspect = app.add_subcommand("inspect", "print manifest or trace statistics");
  std::string inspect_path;
  inspect->add_option("path", inspect_path, "manifest or trace file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      SynthConfig cfg = synth_config_from_json(read_json(synth_config));
      if (synth->count("--seed") > 0) cfg.seed = seed;
      cmd_synth(cfg, synth_out, std::cerr);
    } else if (run->parsed()) {
      RunRequest req;
      req.manifest = manifest;
      req.pipeline = resolve_pipeline(preset, run_config);
      req.protocol = protocol;
      req.target = target;
      req.seed = seed;
      req.out_dir = run_out;
      req.jobs = jobs;
      req.cache_dir = cache_from_env();
      std::cout << cmd_run(req, std::cerr);
    } else if (plot->parsed()) {
      const Stage st = [&] {
        try {
          return stage_from_string(stage);
        } catch (const std::invalid_argument& ex) {
          throw UsageError(ex.what());
        }
      }();
      cmd_plot(plot_trace, st, plot_out, resolve_pipeline(plot_preset, plot_config));
    } else if (inspect->parsed()) {
      cmd_inspect(inspect_path, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
