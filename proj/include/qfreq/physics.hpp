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
 * physics.hpp - synthetic chip physics and the ground-truth gate error oracle.
 *
 * Every gate error is assembled from five mechanisms:
 *   relaxation   t_gate / T1(w), T1 dipping at Lorentzian TLS defects
 *   dephasing    alpha_phi * |dw/dphi| * t_gate on w(phi) = w_max sqrt|cos(pi phi)|
 *   distortion   alpha_dist * ((w_idle - w_on) / 0.5 GHz)^2, two-qubit gates only
 *   stray        A_nn / A_nnn Lorentzians in the detuning to (next-)neighbors
 *   microwave    X_ij Lorentzians in the detuning to crosstalk partners
 * combined as 1 - prod(1 - e_k), with decoherence amplified by
 * (1 + beta * e_stray / (e_stray + 1e-3)).
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "qfreq/chip.hpp"
#include "qfreq/frequency.hpp"

namespace qfreq {

struct TlsDefect {
  double center_ghz = 0;
  double width_ghz = 0;
  double depth_per_us = 0;

  bool operator==(const TlsDefect&) const = default;
};

struct QubitPhysics {
  double omega_max_ghz = 0;
  double t1_base_us = 0;
  std::vector<TlsDefect> tls;

  bool operator==(const QubitPhysics&) const = default;
};

struct OracleConstants {
  double t_1q_ns = 25.0;
  double t_2q_ns = 40.0;
  double alpha_phi = 5e-6;     // per (GHz per flux quantum) per ns
  double alpha_dist = 1e-3;
  double a_nn = 9e-4;
  double a_nnn = 1.8e-4;
  double gamma_xt_ghz = 0.15;
  double gamma_mw_ghz = 0.30;
  double beta = 0.5;
  double eps_floor = 1e-4;
  double xt_scale = 1.5e-4;    // microwave crosstalk weight at unit grid distance

  bool operator==(const OracleConstants&) const = default;
};

struct CrosstalkEntry {
  QubitIndex i = 0;  // i < j
  QubitIndex j = 0;
  double weight = 0;

  bool operator==(const CrosstalkEntry&) const = default;
};

struct ChipPhysics {
  std::uint64_t seed = 0;
  OracleConstants constants;
  std::vector<QubitPhysics> qubits;
  std::vector<CrosstalkEntry> crosstalk;  // sorted by (i, j), symmetric matrix stored once

  /// Dense symmetric crosstalk matrix X (row-major, n x n, zero diagonal).
  std::vector<double> crosstalk_matrix() const;
  std::vector<QubitPair> crosstalk_pairs() const;

  bool operator==(const ChipPhysics&) const = default;
};

/*
 * Draws a synthetic chip: w_max ~ U[f_max, f_max + 0.3], 2-4 TLS defects per
 * qubit centered in the band (width 20-80 MHz, depth 0.015-0.09 / us), X
 * nonzero on all neighbor and next-neighbor pairs plus 5% of the longer-range
 * pairs, with weight ~ 1 / distance^2.
 */
ChipPhysics sample_chip_physics(const ChipTopology& topology, std::uint64_t seed,
                                const FrequencyGrid& band = default_grid(),
                                const OracleConstants& constants = {});

/// Throws std::invalid_argument when the invariants of `physics` do not hold.
void validate_physics(const ChipTopology& topology, const FrequencyGrid& band,
                      const ChipPhysics& physics);

/// |dw/dphi| along w(phi) = omega_max * sqrt(|cos(pi * phi)|), as a function of w.
double dephasing_sensitivity(double omega, double omega_max);

/// Frequency of the chosen spectrum at flux `phi` (the inverse map of the above).
double spectrum_frequency(double phi, double omega_max);
double spectrum_flux(double omega, double omega_max);

using GateErrorVector = std::vector<double>;

/// Per-mechanism breakdown of one gate error. `relaxation` and `dephasing`
/// already include the stray cross-term multiplier.
struct ErrorComponents {
  double relaxation = 0;
  double dephasing = 0;
  double distortion = 0;
  double stray = 0;
  double microwave = 0;
  double total = 0;

  double sum() const { return relaxation + dephasing + distortion + stray + microwave; }
};

/*
 * Precomputed oracle over one (physics, topology, grid). Evaluations are pure
 * and reentrant.
 */
class GateErrorOracle {
 public:
  GateErrorOracle(ChipPhysics physics, ChipTopology topology, FrequencyGrid grid);

  const ChipTopology& topology() const { return topology_; }
  const ChipPhysics& physics() const { return physics_; }
  const FrequencyGrid& grid() const { return grid_; }

  /// Validates `config` and evaluates every gate.
  GateErrorVector evaluate(const FrequencyConfig& config) const;

  /// No grid validation; the caller guarantees `frequencies` is on-grid.
  double gate_error(std::span<const double> frequencies, GateIndex g) const;
  ErrorComponents components(std::span<const double> frequencies, GateIndex g) const;

  /// Relaxation rate 1/T1 in 1/us of qubit `q` at `omega`.
  double relaxation_rate(QubitIndex q, double omega) const;

  /// Gate indices whose frequency can influence the error of gate `g`.
  std::span<const GateIndex> dependencies(GateIndex g) const { return deps_[g]; }
  /// Gates whose error can change when the frequency of gate `var` changes.
  std::span<const GateIndex> affected_gates(GateIndex var) const { return affected_[var]; }

 private:
  struct Partner {
    QubitIndex q;
    double weight;
  };

  ChipPhysics physics_;
  ChipTopology topology_;
  FrequencyGrid grid_;
  std::vector<std::vector<QubitIndex>> neighbors_;
  std::vector<std::vector<QubitIndex>> next_neighbors_;
  std::vector<std::vector<Partner>> mw_partners_;
  std::vector<std::vector<GateIndex>> deps_;
  std::vector<std::vector<GateIndex>> affected_;
};

/// One-shot evaluation.
GateErrorVector gate_error_oracle(const ChipPhysics& physics, const ChipTopology& topology,
                                  const FrequencyConfig& config,
                                  const FrequencyGrid& grid = default_grid());

nlohmann::json physics_to_json(const ChipPhysics& physics);
ChipPhysics physics_from_json(const nlohmann::json& doc);

}  // namespace qfreq
