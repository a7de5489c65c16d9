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

// options.hpp - run configuration shared by every subcommand.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "qfreq/frequency.hpp"

namespace CLI {
class App;
}

namespace qfreq::cli {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitAbort = 3 };

/// Bad user input; maps to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  int rows = 5;
  int cols = 5;
  std::uint64_t seed = 1;
  double f_min_ghz = 4.0;
  double f_max_ghz = 4.8;
  double delta_f_mhz = 2.0;
  int radius = 2;
  int max_iter = 40;
  std::size_t train_size = 4000;
  std::size_t test_size = 500;
  std::filesystem::path out_dir = "qfreq-out";
  unsigned threads = 1;
  std::string estimator = "surrogate";

  int epochs = 40;
  int hidden = 0;  // 0: four times the gate count
  int vqe_depth = 3;
  int vqe_budget = 500;
  std::string pattern = "ABCD";

  FrequencyGrid grid() const;
};

/// Registers every option (flags, TOML keys, QFREQ_OUT_DIR) on `app`.
void add_options(CLI::App& app, Options& options);

/// Cross-field checks the per-flag validators cannot express.
void validate(const Options& options);

}  // namespace qfreq::cli
