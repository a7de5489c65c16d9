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

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "qfreq/chip.hpp"

namespace qfreq {

/*
 * Discrete set of controllable frequencies {f_min + k * delta_f}, in GHz.
 *
 * Values are canonicalized to the nearest double of their 1 kHz-rounded
 * decimal (6 decimals in GHz), so that text round trips are bit-exact.
 */
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(double f_min_ghz, double f_max_ghz, double delta_f_ghz);

  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }
  double delta_f() const { return delta_f_; }
  std::size_t size() const { return size_; }

  double value(std::size_t k) const;
  std::vector<double> values() const;

  /// Grid index of `omega`; throws std::invalid_argument when it is off-grid
  /// or outside [f_min, f_max].
  std::size_t index_of(double omega) const;
  bool contains(double omega) const;

  /// Affine squeeze of the band into (0.01, 0.99).
  double normalize(double omega) const;
  double denormalize(double x) const;

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double f_min_ = 4.0;
  double f_max_ = 4.8;
  double delta_f_ = 0.002;
  std::size_t size_ = 401;
};

FrequencyGrid default_grid();

/*
 * One frequency per gate, laid out in gate index order: idle frequencies of
 * the single-qubit gates followed by interaction frequencies of the couplers.
 */
class FrequencyConfig {
 public:
  FrequencyConfig() = default;
  FrequencyConfig(std::size_t num_qubits, std::vector<double> frequencies);

  std::size_t size() const { return values_.size(); }
  std::size_t num_qubits() const { return num_qubits_; }

  std::span<const double> omega_single() const { return {values_.data(), num_qubits_}; }
  std::span<const double> omega_two() const {
    return {values_.data() + num_qubits_, values_.size() - num_qubits_};
  }
  std::span<const double> values() const { return values_; }

  double operator[](GateIndex g) const { return values_[g]; }
  double idle(QubitIndex q) const { return values_[q]; }
  void set(GateIndex g, double omega) { values_.at(g) = omega; }

  bool operator==(const FrequencyConfig&) const = default;

 private:
  std::size_t num_qubits_ = 0;
  std::vector<double> values_;
};

/// Throws std::invalid_argument unless `config` matches the topology and every
/// entry lies on `grid`.
void validate_config(const ChipTopology& topology, const FrequencyGrid& grid,
                     const FrequencyConfig& config);

nlohmann::json grid_to_json(const FrequencyGrid& grid);
FrequencyGrid grid_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const FrequencyConfig& config);
FrequencyConfig config_from_json(const nlohmann::json& doc);

}  // namespace qfreq
