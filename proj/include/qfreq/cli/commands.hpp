// Copyright 2026 The qfreq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * commands.hpp - the subcommands. Every stage reads its inputs from and writes
 * its artifacts to the output directory. Artifacts are written as
 * <name>.partial and renamed once complete, so a failed stage leaves the
 * .partial file behind.
 */
#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "qfreq/cli/options.hpp"

namespace qfreq::cli {

struct ArtifactPaths {
  std::filesystem::path dir;

  std::filesystem::path chip() const { return dir / "chip.json"; }
  std::filesystem::path physics() const { return dir / "physics.json"; }
  std::filesystem::path train_set() const { return dir / "train.dataset"; }
  std::filesystem::path test_set() const { return dir / "test.dataset"; }
  std::filesystem::path model() const { return dir / "model.qfsm"; }
  std::filesystem::path train_log() const { return dir / "train.json"; }
  std::filesystem::path eval() const { return dir / "eval.json"; }
  std::filesystem::path eval_cdf() const { return dir / "eval_cdf.csv"; }
  std::filesystem::path trace() const { return dir / "trace.jsonl"; }
  std::filesystem::path optimized() const { return dir / "optimized_config.json"; }
  std::filesystem::path greedy() const { return dir / "greedy_config.json"; }
  std::filesystem::path random() const { return dir / "random_config.json"; }
  std::filesystem::path report() const { return dir / "report.json"; }
  std::filesystem::path report_cdf() const { return dir / "report_cdf.csv"; }
  std::filesystem::path vqe() const { return dir / "vqe_report.json"; }
};

void cmd_chip(const Options& options);
void cmd_physics(const Options& options);
void cmd_dataset(const Options& options);
void cmd_train(const Options& options);
void cmd_eval(const Options& options);
void cmd_optimize(const Options& options);
void cmd_bench(const Options& options);
void cmd_vqe(const Options& options);
void cmd_pipeline(const Options& options);

/// Writes `path` through `path.partial`; on failure the partial file stays.
void write_artifact(const std::filesystem::path& path,
                    const std::function<void(const std::filesystem::path&)>& write);

/// Parses argv, runs the subcommand and maps failures to exit codes 0/2/3.
int run_cli(int argc, const char* const* argv);

}  // namespace qfreq::cli
