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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qfreq/chip.hpp"
#include "qfreq/frequency.hpp"
#include "qfreq/physics.hpp"

namespace qfreq {

enum class Split { Train, Test };

struct DatasetProvenance {
  std::uint64_t physics_seed = 0;
  FrequencyGrid grid;
  int rows = 0;
  int cols = 0;

  bool operator==(const DatasetProvenance&) const = default;
};

struct Dataset {
  std::vector<FrequencyConfig> configs;
  std::vector<GateErrorVector> labels;
  Split split = Split::Train;
  DatasetProvenance provenance;

  std::size_t size() const { return configs.size(); }
  std::size_t gate_count() const;

  bool operator==(const Dataset&) const = default;
};

/// Each frequency drawn independently and uniformly from the grid values.
FrequencyConfig sample_config(const ChipTopology& topology, const FrequencyGrid& grid,
                              std::uint64_t seed);

/// Rounds an error to the 6 significant digits stored in dataset files.
double quantize_label(double error);

/*
 * Samples n_train + n_test configurations (train and test from disjoint seed
 * streams, no config shared between splits) and labels them with the oracle.
 * Labels are stored at file precision, see quantize_label(). Labeling is
 * split over `threads` workers; output order does not depend on it.
 */
std::pair<Dataset, Dataset> generate_dataset(const GateErrorOracle& oracle, std::size_t n_train,
                                             std::size_t n_test, std::uint64_t seed,
                                             unsigned threads = 1);

/// Normalized network input: every frequency squeezed into (0.01, 0.99).
std::vector<double> normalize(const FrequencyConfig& config, const FrequencyGrid& grid);

/*
 * Text format:
 *   qfreq-dataset v1, M, N, gate_count, grid{f_min,f_max,delta_f}, split=..., physics_seed=...
 * followed per config by a CSV row of frequencies (GHz, 6 decimals) and a CSV
 * row of errors (scientific, 6 significant digits).
 */
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace qfreq
