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
 * vqe.hpp - hardware-efficient ansatz on a chip qubit line, a small
 * density-matrix simulator with depolarizing gate noise, and an SPSA energy
 * minimizer for the transverse-field Ising chain.
 *
 * Local qubit i of a circuit is bit i of the basis-state index.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qfreq/chip.hpp"

namespace qfreq {

constexpr int kMaxVqeQubits = 8;

struct AnsatzLayer {
  enum class Kind { Rotation, Entangling };
  Kind kind = Kind::Rotation;
  std::size_t param_offset = 0;            // rotation: first angle of this layer
  int group = -1;                          // entangling: pattern group in [0, 4)
  std::vector<std::pair<int, int>> pairs;  // entangling: local qubit pairs
  std::vector<GateIndex> gates;            // entangling: chip gate of each pair
};

struct AnsatzCircuit {
  std::vector<QubitIndex> qubits;  // chip qubit of each local index
  std::vector<GateIndex> single_gates;
  GroupFamily family = GroupFamily::ABCD;
  int depth_cycles = 0;
  std::vector<AnsatzLayer> layers;
  std::size_t num_params = 0;
  std::vector<double> initial_params;

  int n_qubits() const { return static_cast<int>(qubits.size()); }
};

/*
 * Layers U, G0, U, G1, U, G2, U, G3 per cycle and a closing U, where U is one
 * RY per qubit and Gk the CZs of pattern group k among the chosen qubits
 * (possibly empty). Throws if no coupler joins two chosen qubits.
 */
AnsatzCircuit build_hea(const ChipTopology& topology, std::span<const QubitIndex> qubits,
                        const GroupPattern& pattern, int depth_cycles, std::uint64_t seed);

/// Chip qubits of the rows x cols block at (row, col), in serpentine path order.
std::vector<QubitIndex> block_path(const ChipTopology& topology, int row, int col, int rows, int cols);

class NoisyState {
 public:
  explicit NoisyState(int n_qubits);  // |0...0><0...0|

  int n_qubits() const { return n_; }
  const Eigen::MatrixXcd& rho() const { return rho_; }
  Eigen::MatrixXcd& rho() { return rho_; }

  void ry(int q, double theta);
  void cz(int a, int b);
  /// rho -> (1 - p) rho + p (I/2 (x) Tr_q rho), p in [0, 1].
  void depolarize(int q, double p);
  /// Two-qubit analogue on (a, b).
  void depolarize(int a, int b, double p);

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  int n_;
  Eigen::MatrixXcd rho_;
};

/// Per-gate depolarizing rates are scale * gate_errors[chip gate]; an empty
/// error vector means no noise. Rates outside [0, 1) are rejected.
NoisyState simulate_noisy(const AnsatzCircuit& circuit, std::span<const double> params,
                          std::span<const double> gate_errors, double scale = 1.0);

Eigen::VectorXcd simulate_statevector(const AnsatzCircuit& circuit, std::span<const double> params);

struct Tfim {
  int n = 0;
  double g = 1.0;
};

/// H = -sum Z_i Z_{i+1} - g sum X_i over the local line order.
double energy(const NoisyState& state, const Tfim& h);
double energy(const Eigen::VectorXcd& psi, const Tfim& h);
Eigen::MatrixXd tfim_matrix(const Tfim& h);
double exact_ground_energy(const Tfim& h);

struct SpsaOptions {
  int budget = 500;    // energy evaluations
  double a = 2.0;      // step gain
  double c = 0.1;      // perturbation gain
  double alpha = 0.602;
  double gamma = 0.101;
  double stability = -1.0;  // A in a / (k + 1 + A)^alpha; negative: 10% of the iterations
};

struct VqeResult {
  std::vector<double> best_params;
  double best_energy = 0;
  double initial_energy = 0;
  int evaluations = 0;
  std::vector<double> trace;  // energy at each iterate
};

/// SPSA from circuit.initial_params. Perturbations are seeded; the returned
/// energy is the lowest one evaluated.
VqeResult run_vqe(const AnsatzCircuit& circuit, const Tfim& h, std::span<const double> gate_errors,
                  std::uint64_t seed, const SpsaOptions& options = {});

}  // namespace qfreq
