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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qfreq/dataset.hpp"
#include "qfreq/physics.hpp"

using namespace qfreq;

namespace {

double lor(double d, double g) { return g * g / (d * d + g * g); }

// Straight transcription of the error model, driven by grid distances rather
// than the topology's precomputed neighbor lists.
double reference_error(const ChipPhysics& p, const ChipTopology& t, std::span<const double> f, GateIndex g) {
  const OracleConstants& k = p.constants;
  const GateQubits gq = t.gate_qubits(g);
  const bool two = gq.count == 2;
  const double tg = (two ? k.t_2q_ns : k.t_1q_ns) * 1e-3;  // us
  const double w = f[g];
  const std::vector<double> x = p.crosstalk_matrix();
  const std::size_t n = t.num_qubits();

  double t1 = 0, t2 = 0, dist = 0, stray = 0, mw = 0;
  for (QubitIndex q : gq.span()) {
    const QubitPhysics& qp = p.qubits[q];
    double rate = 1.0 / qp.t1_base_us;
    for (const TlsDefect& d : qp.tls) rate += d.depth_per_us * lor(w - d.center_ghz, d.width_ghz);
    t1 += tg * rate;
    const double wm = qp.omega_max_ghz;
    const double r = w / wm;
    t2 += k.alpha_phi * (std::numbers::pi / 2 * wm * wm / w * std::sqrt(1 - r * r * r * r)) * (tg * 1e3);
    if (two) dist += k.alpha_dist * std::pow((f[q] - w) / 0.5, 2);
    for (QubitIndex s = 0; s < n; ++s) {
      if (s == gq.q[0] || (two && s == gq.q[1])) continue;
      const Site a = t.site(q), b = t.site(s);
      const int dr = std::abs(a.row - b.row), dc = std::abs(a.col - b.col);
      if (dr + dc == 1) stray += k.a_nn * lor(w - f[s], k.gamma_xt_ghz);
      if ((dr == 1 && dc == 1) || (dr + dc == 2 && (dr == 0 || dc == 0))) {
        stray += k.a_nnn * lor(w - f[s], k.gamma_xt_ghz);
      }
      mw += x[q * n + s] * lor(w - f[s], k.gamma_mw_ghz);
    }
  }
  const double amp = 1 + k.beta * stray / (stray + 1e-3);
  const double e[] = {std::min(1.0, t1 * amp), std::min(1.0, t2 * amp), std::min(1.0, dist), std::min(1.0, stray),
                      std::min(1.0, mw)};
  double survive = 1;
  for (double v : e) survive *= 1 - v;
  return std::clamp(1 - survive, k.eps_floor, 1 - 1e-6);
}

}  // namespace

TEST_SUITE("physics") {

TEST_CASE("sampling is deterministic and well formed") {
  const ChipTopology t = build_grid(3, 3);
  const FrequencyGrid band = default_grid();
  const ChipPhysics a = sample_chip_physics(t, 7, band);
  const ChipPhysics b = sample_chip_physics(t, 7, band);
  CHECK(a == b);
  CHECK_FALSE(a == sample_chip_physics(t, 8, band));
  CHECK_NOTHROW(validate_physics(t, band, a));

  for (const QubitPhysics& q : a.qubits) {
    CHECK(q.omega_max_ghz >= band.f_max());
    CHECK(q.omega_max_ghz <= band.f_max() + 0.3);
    CHECK(q.tls.size() >= 2);
    CHECK(q.tls.size() <= 4);
    for (const TlsDefect& d : q.tls) {
      CHECK(d.center_ghz >= band.f_min());
      CHECK(d.center_ghz <= band.f_max());
      CHECK(d.width_ghz > 0);
      CHECK(d.depth_per_us >= 0);
    }
  }
  const std::vector<double> x = a.crosstalk_matrix();
  const std::size_t n = t.num_qubits();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(x[i * n + i] == 0);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(x[i * n + j] == x[j * n + i]);
      CHECK(x[i * n + j] >= 0);
    }
  }
}

TEST_CASE("crosstalk covers near pairs, decays, and reaches beyond neighbors") {
  const ChipTopology t = build_grid(5, 5);
  const ChipPhysics p = sample_chip_physics(t, 1);
  const std::vector<double> x = p.crosstalk_matrix();
  const std::size_t n = t.num_qubits();
  for (const auto& pairs : {t.neighbor_pairs(), t.next_neighbor_pairs()}) {
    for (const auto& [i, j] : pairs) CHECK(x[i * n + j] > 0);
  }
  int long_range = 0;
  for (const CrosstalkEntry& e : p.crosstalk) {
    const Site a = t.site(e.i), b = t.site(e.j);
    const double d2 = std::pow(a.row - b.row, 2) + std::pow(a.col - b.col, 2);
    // weight = xt_scale * spread / d^2 with spread in [0.5, 1.5]
    CHECK(e.weight * d2 >= 0.5 * p.constants.xt_scale - 1e-18);
    CHECK(e.weight * d2 <= 1.5 * p.constants.xt_scale + 1e-18);
    long_range += std::abs(a.row - b.row) + std::abs(a.col - b.col) > 2;
  }
  CHECK(long_range >= 1);
  // Every nonzero X entry is a crosstalk pair of the merged topology.
  const ChipTopology merged = t.with_crosstalk_pairs(p.crosstalk_pairs());
  std::set<QubitPair> pairs(merged.crosstalk_pairs().begin(), merged.crosstalk_pairs().end());
  for (const CrosstalkEntry& e : p.crosstalk) CHECK(pairs.count({e.i, e.j}) == 1);
}

TEST_CASE("dephasing sensitivity") {
  CHECK(dephasing_sensitivity(5.0, 5.0) == 0.0);
  CHECK_THROWS_AS(dephasing_sensitivity(0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(dephasing_sensitivity(5.1, 5.0), std::invalid_argument);
  const double wm = 5.2;
  CHECK(dephasing_sensitivity(0.5 * wm, wm) > dephasing_sensitivity(0.9 * wm, wm));
  for (double r : {0.5, 0.8, 0.95}) {
    const double w = r * wm;
    const double phi = spectrum_flux(w, wm);
    CHECK(spectrum_frequency(phi, wm) == doctest::Approx(w).epsilon(1e-12));
    const double h = 1e-6;
    const double fd = (spectrum_frequency(phi + h, wm) - spectrum_frequency(phi - h, wm)) / (2 * h);
    CHECK(std::abs(std::abs(fd) - dephasing_sensitivity(w, wm)) <= 1e-6 * dephasing_sensitivity(w, wm));
  }
}

TEST_CASE("oracle matches an independent transcription of the model") {
  const ChipTopology t = build_grid(4, 3);
  const FrequencyGrid grid = default_grid();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ChipPhysics p = sample_chip_physics(t, seed, grid);
    const GateErrorOracle oracle(p, t, grid);
    for (int c = 0; c < 20; ++c) {
      const FrequencyConfig cfg = sample_config(t, grid, 1000 * seed + c);
      const GateErrorVector e = oracle.evaluate(cfg);
      REQUIRE(e.size() == t.num_gates());
      for (GateIndex g = 0; g < e.size(); ++g) {
        CHECK(e[g] == doctest::Approx(reference_error(p, t, cfg.values(), g)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("TLS defect on the idle frequency raises the error") {
  const ChipTopology t = build_grid(2, 2);
  const FrequencyGrid grid = default_grid();
  ChipPhysics p = sample_chip_physics(t, 11, grid);
  FrequencyConfig cfg = sample_config(t, grid, 5);
  const double w = cfg[0];
  p.qubits[0].tls = {{w, 0.02, 1.0}};
  const double with = GateErrorOracle(p, t, grid).evaluate(cfg)[0];
  p.qubits[0].tls.clear();
  const double without = GateErrorOracle(p, t, grid).evaluate(cfg)[0];
  CHECK(with > without);
}

TEST_CASE("all mechanisms off gives the floor") {
  const ChipTopology t = build_grid(3, 3);
  const FrequencyGrid grid = default_grid();
  ChipPhysics p = sample_chip_physics(t, 4, grid);
  p.constants.alpha_phi = p.constants.alpha_dist = p.constants.a_nn = p.constants.a_nnn = 0;
  p.crosstalk.clear();
  for (QubitPhysics& q : p.qubits) {
    q.tls.clear();
    q.t1_base_us = std::numeric_limits<double>::infinity();
  }
  const GateErrorOracle oracle(p, t, grid);
  for (int c = 0; c < 10; ++c) {
    for (double e : oracle.evaluate(sample_config(t, grid, c))) CHECK(e == p.constants.eps_floor);
  }
}

TEST_CASE("determinism, range, union bound and locality over 1000 configs") {
  const ChipTopology t = build_grid(5, 5);
  const FrequencyGrid grid = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(t, 3, grid), t, grid);
  std::mt19937_64 rng(99);
  std::vector<double> all;
  for (int c = 0; c < 1000; ++c) {
    FrequencyConfig cfg = sample_config(t, grid, c);
    const GateErrorVector e = oracle.evaluate(cfg);
    CHECK(e == oracle.evaluate(cfg));
    for (GateIndex g = 0; g < e.size(); ++g) {
      REQUIRE(e[g] >= oracle.physics().constants.eps_floor);
      REQUIRE(e[g] < 1.0);
      const ErrorComponents k = oracle.components(cfg.values(), g);
      REQUIRE(k.total <= std::max(k.sum(), oracle.physics().constants.eps_floor));
    }
    all.insert(all.end(), e.begin(), e.end());

    // Move one frequency outside gate g's dependency set.
    const GateIndex g = rng() % t.num_gates();
    const auto deps = oracle.dependencies(g);
    GateIndex v = rng() % t.num_gates();
    if (std::find(deps.begin(), deps.end(), v) == deps.end()) {
      cfg.set(v, grid.value(rng() % grid.size()));
      CHECK(oracle.evaluate(cfg)[g] == e[g]);
    }
  }
  std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
  const double med = all[all.size() / 2];
  CHECK(med >= 1e-3);
  CHECK(med <= 1e-1);
}

TEST_CASE("dependencies cover every gate whose error can change") {
  const ChipTopology t = build_grid(4, 4);
  const FrequencyGrid grid = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(t, 9, grid), t, grid);
  const FrequencyConfig base = sample_config(t, grid, 1);
  const GateErrorVector e0 = oracle.evaluate(base);
  for (GateIndex v = 0; v < t.num_gates(); ++v) {
    FrequencyConfig moved = base;
    moved.set(v, base[v] == grid.f_min() ? grid.f_max() : grid.f_min());
    const GateErrorVector e1 = oracle.evaluate(moved);
    const auto affected = oracle.affected_gates(v);
    for (GateIndex g = 0; g < t.num_gates(); ++g) {
      if (e1[g] != e0[g]) CHECK(std::find(affected.begin(), affected.end(), g) != affected.end());
    }
  }
}

TEST_CASE("stray penalty grows as an isolated neighbor pair approaches resonance") {
  const ChipTopology t = build_grid(1, 2);
  const FrequencyGrid grid = default_grid();
  ChipPhysics p = sample_chip_physics(t, 2, grid);
  const GateErrorOracle oracle(p, t, grid);
  std::vector<double> f = {4.4, 4.0, 4.2};
  double last = -1;
  for (int k = 200; k >= 0; k -= 5) {
    f[1] = 4.4 - k * grid.delta_f();
    const double s = oracle.components(f, 0).stray;
    CHECK(s >= last);
    last = s;
  }
}

TEST_CASE("oracle rejects off-grid and out-of-band configs") {
  const ChipTopology t = build_grid(2, 2);
  const FrequencyGrid grid = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(t, 1, grid), t, grid);
  FrequencyConfig cfg = sample_config(t, grid, 1);
  FrequencyConfig off = cfg;
  off.set(2, cfg[2] + 0.0005);
  CHECK_THROWS_AS(oracle.evaluate(off), std::invalid_argument);
  FrequencyConfig out = cfg;
  out.set(5, grid.f_max() + grid.delta_f());
  CHECK_THROWS_AS(oracle.evaluate(out), std::invalid_argument);
  const FrequencyConfig small(4, std::vector<double>(7, 4.2));
  CHECK_THROWS_AS(oracle.evaluate(small), std::invalid_argument);
}

TEST_CASE("physics json round trip") {
  const ChipTopology t = build_grid(3, 4);
  const ChipPhysics p = sample_chip_physics(t, 21);
  const nlohmann::json doc = physics_to_json(p);
  for (const char* key : {"seed", "constants", "qubits", "crosstalk"}) CHECK(doc.contains(key));
  CHECK(doc["qubits"][0].contains("omega_max"));
  CHECK(doc["qubits"][0]["tls"][0].contains("w0"));
  CHECK(physics_from_json(doc) == p);
  CHECK(physics_from_json(nlohmann::json::parse(doc.dump())) == p);
}

}  // TEST_SUITE
