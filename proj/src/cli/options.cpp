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

#include "qfreq/cli/options.hpp"

#include <cmath>

#include <CLI11.hpp>

namespace qfreq::cli {

FrequencyGrid Options::grid() const { return FrequencyGrid(f_min_ghz, f_max_ghz, delta_f_mhz * 1e-3); }

void add_options(CLI::App& app, Options& o) {
  // Precedence is flags > TOML file > environment > defaults.
  app.set_config("--config", "", "TOML file with option values (keys are the long flag names)");

  app.add_option("--rows", o.rows, "Chip rows")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cols", o.cols, "Chip columns")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--f-min-ghz", o.f_min_ghz, "Lower edge of the frequency band")->capture_default_str();
  app.add_option("--f-max-ghz", o.f_max_ghz, "Upper edge of the frequency band")->capture_default_str();
  app.add_option("--delta-f-mhz", o.delta_f_mhz, "Frequency control precision")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--radius", o.radius, "Window radius")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--max-iter", o.max_iter, "Optimizer iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--train-size", o.train_size, "Training configurations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--test-size", o.test_size, "Test configurations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out-dir", o.out_dir, "Artifact directory")->envname("QFREQ_OUT_DIR")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--estimator", o.estimator, "Error estimator driving the search")
      ->check(CLI::IsMember({"surrogate", "oracle"}))
      ->capture_default_str();

  app.add_option("--epochs", o.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--hidden", o.hidden, "Hidden width (0: four times the gate count)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--vqe-depth", o.vqe_depth, "Ansatz pattern cycles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--vqe-budget", o.vqe_budget, "Energy evaluations per VQE run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--pattern", o.pattern, "Coupler group family of the ansatz")
      ->check(CLI::IsMember({"ABCD", "EFGH"}))
      ->capture_default_str();
}

void validate(const Options& o) {
  if (!std::isfinite(o.f_min_ghz) || !std::isfinite(o.f_max_ghz) || !(o.f_max_ghz > o.f_min_ghz)) {
    throw ValidationError("--f-max-ghz must exceed --f-min-ghz");
  }
  if (!(o.f_min_ghz > 0)) throw ValidationError("--f-min-ghz must be positive");
  if (o.rows * o.cols < 2) throw ValidationError("--rows x --cols must hold at least one coupler");
  if (o.out_dir.empty()) throw ValidationError("--out-dir is empty");
}

}  // namespace qfreq::cli
