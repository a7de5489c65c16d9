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

#include "qfreq/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "qfreq/digest.hpp"

namespace qfreq {

namespace {

using cd = std::complex<double>;

bool bit(std::size_t index, int q) { return (index >> q) & 1u; }

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) throw std::out_of_range("qubit " + std::to_string(q) + " out of range");
}

}  // namespace

std::vector<QubitIndex> block_path(const ChipTopology& topology, int row, int col, int rows, int cols) {
  if (rows < 1 || cols < 1 || row < 0 || col < 0 || row + rows > topology.rows() || col + cols > topology.cols()) {
    throw std::invalid_argument("block does not fit on the chip");
  }
  std::vector<QubitIndex> out;
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      const int c = r % 2 == 0 ? k : cols - 1 - k;
      out.push_back(topology.qubit_at(row + r, col + c));
    }
  }
  return out;
}

AnsatzCircuit build_hea(const ChipTopology& topology, std::span<const QubitIndex> qubits,
                        const GroupPattern& pattern, int depth_cycles, std::uint64_t seed) {
  const int n = static_cast<int>(qubits.size());
  if (n < 2 || n > kMaxVqeQubits) throw std::invalid_argument("ansatz needs 2 to 8 qubits");
  if (depth_cycles < 1) throw std::invalid_argument("depth_cycles must be at least 1");
  if (pattern.group_of_coupler.size() != topology.num_couplers()) {
    throw std::invalid_argument("pattern does not belong to this topology");
  }

  AnsatzCircuit c;
  c.qubits.assign(qubits.begin(), qubits.end());
  c.family = pattern.family;
  c.depth_cycles = depth_cycles;
  for (QubitIndex q : c.qubits) {
    if (q >= topology.num_qubits()) throw std::out_of_range("qubit outside the chip");
    if (std::count(c.qubits.begin(), c.qubits.end(), q) != 1) throw std::invalid_argument("repeated qubit");
    c.single_gates.push_back(topology.single_qubit_gate(q));
  }
  auto local = [&](QubitIndex q) {
    return static_cast<int>(std::find(c.qubits.begin(), c.qubits.end(), q) - c.qubits.begin());
  };

  std::vector<AnsatzLayer> groups(4);
  std::size_t restricted = 0;
  for (std::size_t k = 0; k < topology.num_couplers(); ++k) {
    const Coupler& cp = topology.couplers()[k];
    const int a = local(cp.a), b = local(cp.b);
    if (a == n || b == n) continue;
    AnsatzLayer& layer = groups[pattern.group_of_coupler[k]];
    layer.pairs.emplace_back(a, b);
    layer.gates.push_back(topology.two_qubit_gate(k));
    ++restricted;
  }
  if (restricted == 0) throw std::invalid_argument("the chosen qubits share no coupler");

  auto rotation = [&] {
    AnsatzLayer u;
    u.kind = AnsatzLayer::Kind::Rotation;
    u.param_offset = c.num_params;
    c.num_params += static_cast<std::size_t>(n);
    c.layers.push_back(u);
  };
  for (int cycle = 0; cycle < depth_cycles; ++cycle) {
    for (int g = 0; g < 4; ++g) {
      rotation();
      AnsatzLayer e = groups[g];
      e.kind = AnsatzLayer::Kind::Entangling;
      e.group = g;
      c.layers.push_back(std::move(e));
    }
  }
  rotation();

  std::mt19937_64 rng(derive_seed(seed, 0x68656131ull));
  c.initial_params.resize(c.num_params);
  // Full-circle angles; starting near zero parks the line in a local minimum.
  for (double& t : c.initial_params) t = std::numbers::pi * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
  return c;
}

// ---------------------------------------------------------------------------

NoisyState::NoisyState(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxVqeQubits) throw std::invalid_argument("state needs 1 to 8 qubits");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  rho_ = Eigen::MatrixXcd::Zero(dim, dim);
  rho_(0, 0) = 1.0;
}

void NoisyState::ry(int q, double theta) {
  check_qubit(q, n_);
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const std::size_t dim = static_cast<std::size_t>(rho_.rows());
  const std::size_t m = std::size_t{1} << q;
  // U rho, then (U rho) U^T; U is real.
  for (std::size_t col = 0; col < dim; ++col) {
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
      if (r0 & m) continue;
      const cd a = rho_(r0, col), b = rho_(r0 | m, col);
      rho_(r0, col) = c * a - s * b;
      rho_(r0 | m, col) = s * a + c * b;
    }
  }
  for (std::size_t row = 0; row < dim; ++row) {
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & m) continue;
      const cd a = rho_(row, c0), b = rho_(row, c0 | m);
      rho_(row, c0) = c * a - s * b;
      rho_(row, c0 | m) = s * a + c * b;
    }
  }
}

void NoisyState::cz(int a, int b) {
  check_qubit(a, n_);
  check_qubit(b, n_);
  if (a == b) throw std::invalid_argument("cz needs two distinct qubits");
  const std::size_t dim = static_cast<std::size_t>(rho_.rows());
  for (std::size_t r = 0; r < dim; ++r) {
    const bool rs = bit(r, a) && bit(r, b);
    for (std::size_t c = 0; c < dim; ++c) {
      if (rs != (bit(c, a) && bit(c, b))) rho_(r, c) = -rho_(r, c);
    }
  }
}

void NoisyState::depolarize(int q, double p) {
  check_qubit(q, n_);
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("depolarizing probability outside [0, 1]");
  if (p == 0) return;
  const std::size_t dim = static_cast<std::size_t>(rho_.rows());
  const std::size_t m = std::size_t{1} << q;
  for (std::size_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & m) continue;
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & m) continue;
      // Block over the q bits of (row, col): diagonal entries share the
      // partial trace, off-diagonal entries decay.
      const cd mixed = 0.5 * (rho_(r0, c0) + rho_(r0 | m, c0 | m));
      rho_(r0, c0) = (1 - p) * rho_(r0, c0) + p * mixed;
      rho_(r0 | m, c0 | m) = (1 - p) * rho_(r0 | m, c0 | m) + p * mixed;
      rho_(r0 | m, c0) *= 1 - p;
      rho_(r0, c0 | m) *= 1 - p;
    }
  }
}

void NoisyState::depolarize(int a, int b, double p) {
  check_qubit(a, n_);
  check_qubit(b, n_);
  if (a == b) throw std::invalid_argument("two-qubit depolarizing needs distinct qubits");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("depolarizing probability outside [0, 1]");
  if (p == 0) return;
  const std::size_t dim = static_cast<std::size_t>(rho_.rows());
  const std::size_t ma = std::size_t{1} << a, mb = std::size_t{1} << b;
  const std::size_t offs[4] = {0, ma, mb, ma | mb};
  for (std::size_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & (ma | mb)) continue;
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & (ma | mb)) continue;
      cd mixed = 0;
      for (std::size_t o : offs) mixed += rho_(r0 | o, c0 | o);
      mixed *= 0.25;
      for (std::size_t i : offs) {
        for (std::size_t j : offs) {
          cd& v = rho_(r0 | i, c0 | j);
          v = (1 - p) * v + (i == j ? p * mixed : cd(0));
        }
      }
    }
  }
}

double NoisyState::trace_error() const { return std::abs(rho_.trace() - cd(1.0)); }

double NoisyState::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double NoisyState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

namespace {

void check_params(const AnsatzCircuit& circuit, std::span<const double> params) {
  if (params.size() != circuit.num_params) {
    throw std::invalid_argument("expected " + std::to_string(circuit.num_params) + " parameters, got " +
                                std::to_string(params.size()));
  }
}

double rate(std::span<const double> errors, GateIndex g, double scale) {
  if (errors.empty()) return 0.0;
  if (g >= errors.size()) throw std::out_of_range("gate error vector too short for the circuit");
  const double p = scale * errors[g];
  if (!(p >= 0 && p < 1)) throw std::invalid_argument("depolarizing rate " + std::to_string(p) + " outside [0, 1)");
  return p;
}

}  // namespace

NoisyState simulate_noisy(const AnsatzCircuit& circuit, std::span<const double> params,
                          std::span<const double> gate_errors, double scale) {
  check_params(circuit, params);
  if (!(scale >= 0)) throw std::invalid_argument("noise scale must be non-negative");
  NoisyState st(circuit.n_qubits());
  for (const AnsatzLayer& layer : circuit.layers) {
    if (layer.kind == AnsatzLayer::Kind::Rotation) {
      for (int q = 0; q < circuit.n_qubits(); ++q) {
        st.ry(q, params[layer.param_offset + static_cast<std::size_t>(q)]);
        st.depolarize(q, rate(gate_errors, circuit.single_gates[static_cast<std::size_t>(q)], scale));
      }
    } else {
      for (std::size_t k = 0; k < layer.pairs.size(); ++k) {
        const auto [a, b] = layer.pairs[k];
        st.cz(a, b);
        st.depolarize(a, b, rate(gate_errors, layer.gates[k], scale));
      }
    }
  }
  return st;
}

Eigen::VectorXcd simulate_statevector(const AnsatzCircuit& circuit, std::span<const double> params) {
  check_params(circuit, params);
  const int n = circuit.n_qubits();
  const std::size_t dim = std::size_t{1} << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  psi(0) = 1.0;
  for (const AnsatzLayer& layer : circuit.layers) {
    if (layer.kind == AnsatzLayer::Kind::Rotation) {
      for (int q = 0; q < n; ++q) {
        const double t = params[layer.param_offset + static_cast<std::size_t>(q)];
        const double c = std::cos(0.5 * t), s = std::sin(0.5 * t);
        const std::size_t m = std::size_t{1} << q;
        for (std::size_t i = 0; i < dim; ++i) {
          if (i & m) continue;
          const cd a = psi(i), b = psi(i | m);
          psi(i) = c * a - s * b;
          psi(i | m) = s * a + c * b;
        }
      }
    } else {
      for (const auto& [a, b] : layer.pairs) {
        for (std::size_t i = 0; i < dim; ++i) {
          if (bit(i, a) && bit(i, b)) psi(i) = -psi(i);
        }
      }
    }
  }
  return psi;
}

// ---------------------------------------------------------------------------

double energy(const NoisyState& state, const Tfim& h) {
  if (state.n_qubits() != h.n) throw std::invalid_argument("Hamiltonian and state sizes differ");
  const Eigen::MatrixXcd& rho = state.rho();
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  double e = 0;
  for (std::size_t r = 0; r < dim; ++r) {
    double zz = 0;
    for (int i = 0; i + 1 < h.n; ++i) zz += bit(r, i) == bit(r, i + 1) ? 1.0 : -1.0;
    e -= zz * rho(r, r).real();
    for (int i = 0; i < h.n; ++i) e -= h.g * rho(r ^ (std::size_t{1} << i), r).real();
  }
  return e;
}

double energy(const Eigen::VectorXcd& psi, const Tfim& h) {
  const std::size_t dim = static_cast<std::size_t>(psi.size());
  if (dim != (std::size_t{1} << h.n)) throw std::invalid_argument("Hamiltonian and state sizes differ");
  double e = 0;
  for (std::size_t r = 0; r < dim; ++r) {
    double zz = 0;
    for (int i = 0; i + 1 < h.n; ++i) zz += bit(r, i) == bit(r, i + 1) ? 1.0 : -1.0;
    e -= zz * std::norm(psi(r));
    for (int i = 0; i < h.n; ++i) e -= h.g * (std::conj(psi(r ^ (std::size_t{1} << i))) * psi(r)).real();
  }
  return e;
}

Eigen::MatrixXd tfim_matrix(const Tfim& h) {
  if (h.n < 1 || h.n > kMaxVqeQubits) throw std::invalid_argument("Hamiltonian needs 1 to 8 qubits");
  const std::size_t dim = std::size_t{1} << h.n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (int i = 0; i + 1 < h.n; ++i) m(r, r) -= bit(r, i) == bit(r, i + 1) ? 1.0 : -1.0;
    for (int i = 0; i < h.n; ++i) m(r ^ (std::size_t{1} << i), r) -= h.g;
  }
  return m;
}

double exact_ground_energy(const Tfim& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tfim_matrix(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

VqeResult run_vqe(const AnsatzCircuit& circuit, const Tfim& h, std::span<const double> gate_errors,
                  std::uint64_t seed, const SpsaOptions& options) {
  if (options.budget < 1) throw std::invalid_argument("budget must be at least 1 evaluation");
  if (h.n != circuit.n_qubits()) throw std::invalid_argument("Hamiltonian and circuit sizes differ");

  VqeResult res;
  auto evaluate = [&](const std::vector<double>& theta) {
    const double e = energy(simulate_noisy(circuit, theta, gate_errors), h);
    ++res.evaluations;
    if (res.evaluations == 1 || e < res.best_energy) {
      res.best_energy = e;
      res.best_params = theta;
    }
    return e;
  };

  std::vector<double> theta = circuit.initial_params;
  res.initial_energy = evaluate(theta);
  res.trace.push_back(res.initial_energy);

  std::mt19937_64 rng(derive_seed(seed, 0x73707361ull));
  const std::size_t np = theta.size();
  std::vector<double> delta(np), plus(np), minus(np);
  const double stability = options.stability >= 0 ? options.stability : 0.1 * ((options.budget - 1) / 3);
  for (int k = 0; res.evaluations + 3 <= options.budget; ++k) {
    const double ak = options.a / std::pow(k + 1 + stability, options.alpha);
    const double ck = options.c / std::pow(k + 1, options.gamma);
    for (std::size_t i = 0; i < np; ++i) {
      delta[i] = (rng() >> 63) ? 1.0 : -1.0;
      plus[i] = theta[i] + ck * delta[i];
      minus[i] = theta[i] - ck * delta[i];
    }
    const double diff = evaluate(plus) - evaluate(minus);
    for (std::size_t i = 0; i < np; ++i) theta[i] -= ak * diff / (2.0 * ck * delta[i]);
    res.trace.push_back(evaluate(theta));
  }
  return res;
}

}  // namespace qfreq
