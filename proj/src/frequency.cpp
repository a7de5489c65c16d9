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

#include "qfreq/frequency.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qfreq {

namespace {

constexpr double kKhzPerGhz = 1e6;
constexpr double kOnGridTolerance = 1e-6;  // in units of delta_f

double canonical(double ghz) { return std::round(ghz * kKhzPerGhz) / kKhzPerGhz; }

}  // namespace

FrequencyGrid::FrequencyGrid(double f_min_ghz, double f_max_ghz, double delta_f_ghz)
    : f_min_(canonical(f_min_ghz)), f_max_(canonical(f_max_ghz)), delta_f_(canonical(delta_f_ghz)) {
  if (!(f_max_ > f_min_)) throw std::invalid_argument("frequency band must satisfy f_max > f_min");
  if (!(delta_f_ > 0)) throw std::invalid_argument("frequency step must be positive");
  size_ = static_cast<std::size_t>(std::floor((f_max_ - f_min_) / delta_f_ + kOnGridTolerance)) + 1;
}

double FrequencyGrid::value(std::size_t k) const {
  if (k >= size_) throw std::out_of_range("grid index out of range");
  return canonical(f_min_ + static_cast<double>(k) * delta_f_);
}

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> out(size_);
  for (std::size_t k = 0; k < size_; ++k) out[k] = value(k);
  return out;
}

std::size_t FrequencyGrid::index_of(double omega) const {
  const double pos = (omega - f_min_) / delta_f_;
  const double k = std::round(pos);
  if (!std::isfinite(pos) || std::abs(pos - k) > kOnGridTolerance || k < 0 ||
      k >= static_cast<double>(size_)) {
    std::ostringstream msg;
    msg << "frequency " << omega << " GHz is not on the grid [" << f_min_ << ", " << f_max_
        << "] step " << delta_f_;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<std::size_t>(k);
}

bool FrequencyGrid::contains(double omega) const {
  try {
    index_of(omega);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

double FrequencyGrid::normalize(double omega) const {
  return 0.01 + 0.98 * (omega - f_min_) / (f_max_ - f_min_);
}

double FrequencyGrid::denormalize(double x) const {
  return f_min_ + (x - 0.01) / 0.98 * (f_max_ - f_min_);
}

FrequencyGrid default_grid() { return FrequencyGrid(4.0, 4.8, 0.002); }

FrequencyConfig::FrequencyConfig(std::size_t num_qubits, std::vector<double> frequencies)
    : num_qubits_(num_qubits), values_(std::move(frequencies)) {
  if (num_qubits_ > values_.size()) {
    throw std::invalid_argument("configuration has fewer frequencies than qubits");
  }
}

void validate_config(const ChipTopology& topology, const FrequencyGrid& grid,
                     const FrequencyConfig& config) {
  if (config.num_qubits() != topology.num_qubits() || config.size() != topology.num_gates()) {
    throw std::invalid_argument("configuration shape " + std::to_string(config.num_qubits()) + "+" +
                                std::to_string(config.size() - config.num_qubits()) +
                                " does not match the chip");
  }
  for (double w : config.values()) grid.index_of(w);
}

nlohmann::json grid_to_json(const FrequencyGrid& grid) {
  return {{"f_min", grid.f_min()}, {"f_max", grid.f_max()}, {"delta_f", grid.delta_f()}};
}

FrequencyGrid grid_from_json(const nlohmann::json& doc) {
  return FrequencyGrid(doc.at("f_min").get<double>(), doc.at("f_max").get<double>(),
                       doc.at("delta_f").get<double>());
}

nlohmann::json config_to_json(const FrequencyConfig& config) {
  const auto single = config.omega_single();
  const auto two = config.omega_two();
  return {{"omega_single", std::vector<double>(single.begin(), single.end())},
          {"omega_two", std::vector<double>(two.begin(), two.end())}};
}

FrequencyConfig config_from_json(const nlohmann::json& doc) {
  auto single = doc.at("omega_single").get<std::vector<double>>();
  const auto two = doc.at("omega_two").get<std::vector<double>>();
  const std::size_t n = single.size();
  single.insert(single.end(), two.begin(), two.end());
  return FrequencyConfig(n, std::move(single));
}

}  // namespace qfreq
