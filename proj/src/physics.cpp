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

#include "qfreq/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

namespace qfreq {

namespace {

constexpr double kStrayKnee = 1e-3;
constexpr double kDistortionScaleGhz = 0.5;
constexpr double kMaxError = 1.0 - 1e-6;
constexpr double kLongRangeFraction = 0.05;

inline double lorentzian(double detuning, double gamma) {
  const double g2 = gamma * gamma;
  return g2 / (detuning * detuning + g2);
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::vector<double> ChipPhysics::crosstalk_matrix() const {
  const std::size_t n = qubits.size();
  std::vector<double> x(n * n, 0.0);
  for (const auto& e : crosstalk) {
    x[e.i * n + e.j] = e.weight;
    x[e.j * n + e.i] = e.weight;
  }
  return x;
}

std::vector<QubitPair> ChipPhysics::crosstalk_pairs() const {
  std::vector<QubitPair> out;
  out.reserve(crosstalk.size());
  for (const auto& e : crosstalk) out.emplace_back(e.i, e.j);
  return out;
}

ChipPhysics sample_chip_physics(const ChipTopology& topology, std::uint64_t seed,
                                const FrequencyGrid& band, const OracleConstants& constants) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x70687973u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  ChipPhysics p;
  p.seed = seed;
  p.constants = constants;
  p.qubits.resize(topology.num_qubits());
  for (auto& q : p.qubits) {
    q.omega_max_ghz = uniform(band.f_max(), band.f_max() + 0.3);
    q.t1_base_us = 80.0;
    const int defects = 2 + static_cast<int>(unit(rng) * 3.0);
    for (int d = 0; d < defects; ++d) {
      TlsDefect tls;
      tls.center_ghz = uniform(band.f_min(), band.f_max());
      tls.width_ghz = uniform(0.020, 0.080);
      tls.depth_per_us = uniform(0.015, 0.09);
      q.tls.push_back(tls);
    }
  }

  for (QubitIndex i = 0; i < topology.num_qubits(); ++i) {
    const Site si = topology.site(i);
    for (QubitIndex j = i + 1; j < topology.num_qubits(); ++j) {
      const Site sj = topology.site(j);
      const int dr = si.row - sj.row;
      const int dc = si.col - sj.col;
      const int manhattan = std::abs(dr) + std::abs(dc);
      const double dist2 = static_cast<double>(dr * dr + dc * dc);
      // Draw both numbers for every pair so the stream does not depend on
      // which pairs end up selected.
      const double select = unit(rng);
      const double spread = uniform(0.5, 1.5);
      if (manhattan <= 2 || select < kLongRangeFraction) {
        p.crosstalk.push_back({i, j, constants.xt_scale * spread / dist2});
      }
    }
  }
  return p;
}

void validate_physics(const ChipTopology& topology, const FrequencyGrid& band,
                      const ChipPhysics& physics) {
  const auto& k = physics.constants;
  if (physics.qubits.size() != topology.num_qubits()) {
    throw std::invalid_argument("physics describes " + std::to_string(physics.qubits.size()) +
                                " qubits, chip has " + std::to_string(topology.num_qubits()));
  }
  if (!(k.eps_floor > 0 && k.eps_floor <= 1e-4)) throw std::invalid_argument("eps_floor must be in (0, 1e-4]");
  if (!(k.gamma_xt_ghz > 0 && k.gamma_mw_ghz > 0)) throw std::invalid_argument("Lorentzian widths must be positive");
  for (const auto& q : physics.qubits) {
    if (!(q.omega_max_ghz >= band.f_max())) throw std::invalid_argument("omega_max below the band top");
    if (!(q.t1_base_us > 0)) throw std::invalid_argument("t1_base must be positive");
    for (const auto& d : q.tls) {
      if (!(d.width_ghz > 0) || d.depth_per_us < 0 || d.center_ghz < band.f_min() - 0.1 ||
          d.center_ghz > band.f_max() + 0.1) {
        throw std::invalid_argument("TLS defect parameters out of range");
      }
    }
  }
  for (const auto& e : physics.crosstalk) {
    if (e.i >= e.j || e.j >= topology.num_qubits() || e.weight < 0) {
      throw std::invalid_argument("invalid crosstalk entry");
    }
  }
}

// ---------------------------------------------------------------------------

double dephasing_sensitivity(double omega, double omega_max) {
  if (!(omega > 0) || !(omega <= omega_max)) {
    throw std::invalid_argument("dephasing sensitivity requires 0 < omega <= omega_max");
  }
  const double r = omega / omega_max;
  const double r4 = r * r * r * r;
  return std::numbers::pi / 2.0 * (omega_max * omega_max / omega) * std::sqrt(std::max(0.0, 1.0 - r4));
}

double spectrum_frequency(double phi, double omega_max) {
  return omega_max * std::sqrt(std::abs(std::cos(std::numbers::pi * phi)));
}

double spectrum_flux(double omega, double omega_max) {
  const double r = omega / omega_max;
  return std::acos(r * r) / std::numbers::pi;
}

// ---------------------------------------------------------------------------

GateErrorOracle::GateErrorOracle(ChipPhysics physics, ChipTopology topology, FrequencyGrid grid)
    : physics_(std::move(physics)), topology_(std::move(topology)), grid_(grid) {
  validate_physics(topology_, grid_, physics_);
  const std::size_t n = topology_.num_qubits();
  const std::size_t gates = topology_.num_gates();

  neighbors_.resize(n);
  next_neighbors_.resize(n);
  for (QubitIndex q = 0; q < n; ++q) {
    const auto nb = topology_.neighbors(q);
    const auto nnb = topology_.next_neighbors(q);
    neighbors_[q].assign(nb.begin(), nb.end());
    next_neighbors_[q].assign(nnb.begin(), nnb.end());
  }
  mw_partners_.resize(n);
  for (const auto& e : physics_.crosstalk) {
    if (e.weight == 0) continue;
    mw_partners_[e.i].push_back({e.j, e.weight});
    mw_partners_[e.j].push_back({e.i, e.weight});
  }
  for (auto& v : mw_partners_) {
    std::sort(v.begin(), v.end(), [](const Partner& a, const Partner& b) { return a.q < b.q; });
  }

  deps_.resize(gates);
  affected_.resize(gates);
  for (GateIndex g = 0; g < gates; ++g) {
    std::set<GateIndex> d;
    d.insert(g);
    for (QubitIndex q : topology_.gate_qubits(g).span()) {
      d.insert(topology_.single_qubit_gate(q));
      for (QubitIndex s : neighbors_[q]) d.insert(s);
      for (QubitIndex s : next_neighbors_[q]) d.insert(s);
      for (const auto& p : mw_partners_[q]) d.insert(p.q);
    }
    deps_[g].assign(d.begin(), d.end());
    for (GateIndex v : deps_[g]) affected_[v].push_back(g);
  }
}

double GateErrorOracle::relaxation_rate(QubitIndex q, double omega) const {
  const QubitPhysics& qp = physics_.qubits[q];
  double rate = 1.0 / qp.t1_base_us;
  for (const auto& d : qp.tls) rate += d.depth_per_us * lorentzian(omega - d.center_ghz, d.width_ghz);
  return rate;
}

ErrorComponents GateErrorOracle::components(std::span<const double> f, GateIndex g) const {
  const OracleConstants& k = physics_.constants;
  const GateQubits gq = topology_.gate_qubits(g);
  const bool two = gq.count == 2;
  const double t_ns = two ? k.t_2q_ns : k.t_1q_ns;
  const double omega = f[g];  // idle frequency, or the shared interaction frequency

  auto is_gate_qubit = [&](QubitIndex s) { return s == gq.q[0] || (two && s == gq.q[1]); };

  double relax = 0, dephase = 0, dist = 0, stray = 0, mw = 0;
  for (QubitIndex q : gq.span()) {
    relax += t_ns * 1e-3 * relaxation_rate(q, omega);
    if (k.alpha_phi != 0) {
      dephase += k.alpha_phi * dephasing_sensitivity(omega, physics_.qubits[q].omega_max_ghz) * t_ns;
    }
    if (two) {
      const double shift = (f[q] - omega) / kDistortionScaleGhz;
      dist += k.alpha_dist * shift * shift;
    }
    for (QubitIndex s : neighbors_[q]) {
      if (!is_gate_qubit(s)) stray += k.a_nn * lorentzian(omega - f[s], k.gamma_xt_ghz);
    }
    for (QubitIndex s : next_neighbors_[q]) {
      if (!is_gate_qubit(s)) stray += k.a_nnn * lorentzian(omega - f[s], k.gamma_xt_ghz);
    }
    for (const auto& p : mw_partners_[q]) {
      if (!is_gate_qubit(p.q)) mw += p.weight * lorentzian(omega - f[p.q], k.gamma_mw_ghz);
    }
  }

  const double amplify = 1.0 + k.beta * stray / (stray + kStrayKnee);
  ErrorComponents c;
  c.relaxation = clamp01(relax * amplify);
  c.dephasing = clamp01(dephase * amplify);
  c.distortion = clamp01(dist);
  c.stray = clamp01(stray);
  c.microwave = clamp01(mw);
  const double survive = (1 - c.relaxation) * (1 - c.dephasing) * (1 - c.distortion) *
                         (1 - c.stray) * (1 - c.microwave);
  c.total = std::clamp(1.0 - survive, k.eps_floor, kMaxError);
  return c;
}

double GateErrorOracle::gate_error(std::span<const double> frequencies, GateIndex g) const {
  return components(frequencies, g).total;
}

GateErrorVector GateErrorOracle::evaluate(const FrequencyConfig& config) const {
  validate_config(topology_, grid_, config);
  GateErrorVector out(topology_.num_gates());
  for (GateIndex g = 0; g < out.size(); ++g) out[g] = gate_error(config.values(), g);
  return out;
}

GateErrorVector gate_error_oracle(const ChipPhysics& physics, const ChipTopology& topology,
                                  const FrequencyConfig& config, const FrequencyGrid& grid) {
  return GateErrorOracle(physics, topology, grid).evaluate(config);
}

// ---------------------------------------------------------------------------

nlohmann::json physics_to_json(const ChipPhysics& p) {
  const auto& k = p.constants;
  nlohmann::json qubits = nlohmann::json::array();
  for (const auto& q : p.qubits) {
    nlohmann::json tls = nlohmann::json::array();
    for (const auto& d : q.tls) {
      tls.push_back({{"w0", d.center_ghz}, {"gamma", d.width_ghz}, {"depth", d.depth_per_us}});
    }
    qubits.push_back({{"omega_max", q.omega_max_ghz}, {"t1_base", q.t1_base_us}, {"tls", std::move(tls)}});
  }
  nlohmann::json xt = nlohmann::json::array();
  for (const auto& e : p.crosstalk) xt.push_back({e.i, e.j, e.weight});
  return {{"seed", p.seed},
          {"constants",
           {{"t_1q", k.t_1q_ns},
            {"t_2q", k.t_2q_ns},
            {"alpha_phi", k.alpha_phi},
            {"alpha_dist", k.alpha_dist},
            {"A_nn", k.a_nn},
            {"A_nnn", k.a_nnn},
            {"Gamma_xt", k.gamma_xt_ghz},
            {"Gamma_mw", k.gamma_mw_ghz},
            {"beta", k.beta},
            {"eps_floor", k.eps_floor},
            {"xt_scale", k.xt_scale}}},
          {"qubits", std::move(qubits)},
          {"crosstalk", std::move(xt)}};
}

ChipPhysics physics_from_json(const nlohmann::json& doc) {
  ChipPhysics p;
  p.seed = doc.at("seed").get<std::uint64_t>();
  const auto& c = doc.at("constants");
  auto& k = p.constants;
  k.t_1q_ns = c.at("t_1q").get<double>();
  k.t_2q_ns = c.at("t_2q").get<double>();
  k.alpha_phi = c.at("alpha_phi").get<double>();
  k.alpha_dist = c.at("alpha_dist").get<double>();
  k.a_nn = c.at("A_nn").get<double>();
  k.a_nnn = c.at("A_nnn").get<double>();
  k.gamma_xt_ghz = c.at("Gamma_xt").get<double>();
  k.gamma_mw_ghz = c.at("Gamma_mw").get<double>();
  k.beta = c.at("beta").get<double>();
  k.eps_floor = c.at("eps_floor").get<double>();
  k.xt_scale = c.value("xt_scale", k.xt_scale);
  for (const auto& q : doc.at("qubits")) {
    QubitPhysics qp;
    qp.omega_max_ghz = q.at("omega_max").get<double>();
    qp.t1_base_us = q.at("t1_base").get<double>();
    for (const auto& d : q.at("tls")) {
      qp.tls.push_back({d.at("w0").get<double>(), d.at("gamma").get<double>(), d.at("depth").get<double>()});
    }
    p.qubits.push_back(std::move(qp));
  }
  for (const auto& e : doc.at("crosstalk")) {
    QubitIndex i = e.at(0).get<QubitIndex>();
    QubitIndex j = e.at(1).get<QubitIndex>();
    if (i > j) std::swap(i, j);
    p.crosstalk.push_back({i, j, e.at(2).get<double>()});
  }
  std::sort(p.crosstalk.begin(), p.crosstalk.end(),
            [](const CrosstalkEntry& a, const CrosstalkEntry& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return p;
}

}  // namespace qfreq
