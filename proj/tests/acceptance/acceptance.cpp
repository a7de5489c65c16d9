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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Criteria 3 and 8 reuse the criterion-1 model.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qfreq/chip.hpp"
#include "qfreq/cli/commands.hpp"
#include "qfreq/dataset.hpp"
#include "qfreq/digest.hpp"
#include "qfreq/optimizer.hpp"
#include "qfreq/physics.hpp"
#include "qfreq/surrogate.hpp"
#include "qfreq/vqe.hpp"

using namespace qfreq;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Same seed streams as the pipeline.
constexpr std::uint64_t kDataStream = 0x64617461ull;
constexpr std::uint64_t kTrainStream = 0x6d6f64656cull;
constexpr std::uint64_t kRandomStream = 0x72616e64ull;
constexpr std::uint64_t kVqeStream = 0x767165ull;
constexpr std::uint64_t kSeed = 1;

struct Trained {
  ChipTopology topo = build_grid(5, 5);
  FrequencyGrid grid = default_grid();
  GateErrorOracle oracle{sample_chip_physics(topo, kSeed, grid), topo, grid};
  SurrogateModel model;
};

// --- 1 ----------------------------------------------------------------------

void surrogate_quality(Trained& t) {
  auto [train_set, test_set] = generate_dataset(t.oracle, 4000, 500, derive_seed(kSeed, kDataStream), worker_count());
  TrainHyper hyper;
  hyper.epochs = 40;
  const auto t0 = Clock::now();
  TrainResult r = train(train_set, hyper, derive_seed(kSeed, kTrainStream));
  const double secs = seconds_since(t0);
  t.model = std::move(r.model);
  const EvalMetrics train_m = evaluate(t.model, train_set);
  const EvalMetrics test_m = evaluate(t.model, test_set);
  const bool ok = test_m.median_relative_error <= 0.30 &&
                  test_m.median_absolute_error <= 2 * train_m.median_absolute_error && secs <= 600;
  verdict(1, ok,
          fmt("test median rel %.4f (<= 0.30), test median abs %.3e vs 2x train %.3e, train %.0f s (<= 600)",
              test_m.median_relative_error, test_m.median_absolute_error, 2 * train_m.median_absolute_error,
              secs));
}

// --- 2 ----------------------------------------------------------------------

void gradient_check() {
  const auto t0 = Clock::now();
  const ChipTopology topo = build_grid(2, 2);  // D = 8
  const FrequencyGrid grid = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(topo, 3, grid), topo, grid);
  auto [data, unused] = generate_dataset(oracle, 6, 1, 4);
  SurrogateModel model = SurrogateModel::initialized(topo.num_gates(), {16, 16}, grid, 9, -4.0, 0.3);

  std::vector<std::vector<double>> inputs;
  for (const FrequencyConfig& c : data.configs) inputs.push_back(normalize(c, grid));
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (GateIndex g = 0; g < topo.num_gates(); ++g) samples.push_back({inputs[i].data(), g, std::log(data.labels[i][g])});
  }
  std::vector<double> grad;
  batch_loss(model, samples, &grad);

  std::mt19937_64 rng(21);
  const std::size_t n = model.parameters().size();
  const int checks = 150;
  double worst = 0;
  for (int k = 0; k < checks; ++k) {
    const std::size_t i = rng() % n;
    double& p = model.parameters()[i];
    const double saved = p, h = 1e-5;
    p = saved + h;
    const double up = batch_loss(model, samples);
    p = saved - h;
    const double down = batch_loss(model, samples);
    p = saved;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-8}));
  }
  const double secs = seconds_since(t0);
  verdict(2, worst <= 1e-4 && secs < 60,
          fmt("%d parameters, worst relative gap %.2e (<= 1e-4), %.1f s", checks, worst, secs));
}

// --- 3 ----------------------------------------------------------------------

FrequencyConfig optimizer_convergence(const Trained& t) {
  const SurrogateEstimator est(t.model, worker_count());
  RunOptions o;
  o.radius = 2;
  o.max_iter = 40;
  o.seed = kSeed;
  const auto t0 = Clock::now();
  const OptimizationTrace tr = run(est, t.topo, t.grid, o, &t.oracle);
  const double secs = seconds_since(t0);
  bool monotone = true;
  double prev = mean(est.predict_all(tr.initial));
  for (const IterationRecord& r : tr.iterations) {
    monotone = monotone && r.mean_pred <= prev;
    prev = r.mean_pred;
  }
  const double final_err = mean(t.oracle.evaluate(tr.final_config));
  verdict(3, final_err < 1e-2 && monotone && secs <= 300,
          fmt("final mean oracle error %.3e (< 1e-2) after %zu iterations, predicted mean %s, %.0f s (<= 300)",
              final_err, tr.iterations.size(), monotone ? "non-increasing" : "INCREASED", secs));
  return tr.final_config;
}

// --- 4 and 5 ----------------------------------------------------------------

double mean_two_qubit(const ChipTopology& topo, const GateErrorVector& e) {
  return mean(std::span<const double>(e).subspan(topo.num_qubits()));
}
double mean_single_qubit(const ChipTopology& topo, const GateErrorVector& e) {
  return mean(std::span<const double>(e).first(topo.num_qubits()));
}

void radius_study() {
  const auto t0 = Clock::now();
  const ChipTopology topo = build_grid(5, 5);
  const FrequencyGrid grid = default_grid();
  int r2_le_r1 = 0, r3_le_r2 = 0;
  std::string rows;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const GateErrorOracle oracle(sample_chip_physics(topo, s, grid), topo, grid);
    const OracleEstimator est(oracle);
    double final_err[4] = {0, 0, 0, 0};
    for (int radius = 1; radius <= 3; ++radius) {
      RunOptions o;
      o.radius = radius;
      o.max_iter = 40;
      o.seed = s;
      final_err[radius] = mean(oracle.evaluate(run(est, topo, grid, o).final_config));
    }
    r2_le_r1 += final_err[2] <= final_err[1];
    r3_le_r2 += final_err[3] <= final_err[2];
    rows += fmt("\n    seed %2llu  r1 %.4e  r2 %.4e  r3 %.4e", static_cast<unsigned long long>(s), final_err[1],
                final_err[2], final_err[3]);
  }
  verdict(4, r2_le_r1 >= 7 && r3_le_r2 >= 7,
          fmt("r2 <= r1 on %d/10, r3 <= r2 on %d/10 (each >= 7), %.0f s", r2_le_r1, r3_le_r2, seconds_since(t0)) +
              rows);
}

void strategy_ordering() {
  const auto t0 = Clock::now();
  const ChipTopology topo = build_grid(5, 5);
  const FrequencyGrid grid = default_grid();
  int two_ordered = 0, single_ordered = 0;
  std::string rows;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const GateErrorOracle oracle(sample_chip_physics(topo, s, grid), topo, grid);
    const OracleEstimator est(oracle);
    RunOptions o;
    o.radius = 2;
    o.max_iter = 40;
    o.seed = s;
    const GateErrorVector opt = oracle.evaluate(run(est, topo, grid, o).final_config);
    const GateErrorVector snake = oracle.evaluate(greedy_snake(est, topo, grid, 2, s).config);
    const GateErrorVector rnd = oracle.evaluate(random_baseline(topo, grid, derive_seed(s, kRandomStream)));
    const double o2 = mean_two_qubit(topo, opt), s2 = mean_two_qubit(topo, snake), r2 = mean_two_qubit(topo, rnd);
    const double o1 = mean_single_qubit(topo, opt), r1 = mean_single_qubit(topo, rnd);
    two_ordered += o2 < s2 && s2 < r2;
    single_ordered += o1 < r1;
    rows += fmt("\n    seed %2llu  2q opt %.3e snake %.3e random %.3e | 1q opt %.3e random %.3e",
                static_cast<unsigned long long>(s), o2, s2, r2, o1, r1);
  }
  verdict(5, two_ordered >= 8 && single_ordered >= 9,
          fmt("two-qubit opt < snake < random on %d/10 (>= 8), single-qubit opt < random on %d/10 (>= 9), %.0f s",
              two_ordered, single_ordered, seconds_since(t0)) +
              rows);
}

// --- 6 ----------------------------------------------------------------------

// Independent count: every edge subset checked for shared endpoints.
std::uint64_t brute_force_matchings(const ChipTopology& topo) {
  const auto& cs = topo.couplers();
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cs.size()); ++mask) {
    std::vector<char> used(topo.num_qubits(), 0);
    bool ok = true;
    for (std::size_t k = 0; k < cs.size() && ok; ++k) {
      if (!(mask >> k & 1)) continue;
      ok = !used[cs[k].a] && !used[cs[k].b];
      used[cs[k].a] = used[cs[k].b] = 1;
    }
    count += ok;
  }
  return count;
}

void matchings_engine() {
  const auto t0 = Clock::now();
  bool ok = true;
  int grids = 0;
  for (int r = 1; r <= 13; ++r) {
    for (int c = 1; c <= 13; ++c) {
      if (r * c < 2 || r * (c - 1) + c * (r - 1) > 12) continue;
      const ChipTopology topo = build_grid(r, c);
      ok = ok && count_parallel_scenarios(topo) == brute_force_matchings(topo);
      ++grids;
    }
  }
  const bool frozen = count_parallel_scenarios(build_grid(1, 2)) == 2 && count_parallel_scenarios(build_grid(2, 2)) == 7 &&
                      count_parallel_scenarios(build_grid(2, 3)) == 22;
  std::vector<double> logs = {0.0};  // 1x1: the empty matching
  for (int n = 2; n <= 5; ++n) logs.push_back(std::log(count_parallel_scenarios(build_grid(n, n)).convert_to<double>()));
  bool growing = true;
  std::string incs;
  for (std::size_t k = 1; k < logs.size(); ++k) {
    incs += fmt(" %.3f", logs[k] - logs[k - 1]);
    if (k >= 2) growing = growing && logs[k] - logs[k - 1] > logs[k - 1] - logs[k - 2];
  }
  verdict(6, ok && frozen && growing,
          fmt("%d grids match brute force: %s, 1x2/2x2/2x3 = 2/7/22: %s, log increments%s %s, %.2f s", grids,
              ok ? "yes" : "no", frozen ? "yes" : "no", incs.c_str(), growing ? "increasing" : "NOT increasing",
              seconds_since(t0)));
}

// --- 7 ----------------------------------------------------------------------

void oracle_properties() {
  const auto t0 = Clock::now();
  const ChipTopology topo = build_grid(5, 5);
  const FrequencyGrid grid = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(topo, kSeed, grid), topo, grid);
  std::mt19937_64 rng(77);
  bool deterministic = true, local = true, in_range = true, bounded = true;
  std::vector<double> all;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const FrequencyConfig c = sample_config(topo, grid, derive_seed(s, 0x6f7072));
    const GateErrorVector e = oracle.evaluate(c);
    deterministic = deterministic && e == oracle.evaluate(c);
    for (GateIndex g = 0; g < e.size(); ++g) {
      in_range = in_range && e[g] >= 0 && e[g] <= 1;
      const ErrorComponents comp = oracle.components(c.values(), g);
      bounded = bounded && comp.total <= comp.sum() && comp.total == e[g];
      all.push_back(e[g]);
    }
    // Moving a frequency outside a gate's dependency set leaves its error unchanged.
    const GateIndex g = rng() % e.size();
    const auto deps = oracle.dependencies(g);
    const GateIndex var = rng() % e.size();
    if (std::find(deps.begin(), deps.end(), var) == deps.end()) {
      FrequencyConfig moved = c;
      moved.set(var, grid.value(rng() % grid.size()));
      local = local && oracle.evaluate(moved)[g] == e[g];
    }
  }
  std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
  const double med = all[all.size() / 2];
  verdict(7, deterministic && local && in_range && bounded && med >= 1e-3 && med <= 1e-1,
          fmt("determinism %d, locality %d, range %d, total <= sum %d, median %.3e in [1e-3, 1e-1], %.1f s",
              deterministic, local, in_range, bounded, med, seconds_since(t0)));
}

// --- 8 ----------------------------------------------------------------------

void vqe_ordering(const Trained& t, const FrequencyConfig& optimized) {
  const std::vector<QubitIndex> qubits = block_path(t.topo, 1, 1, 2, 2);
  const GroupPattern pattern = assign_groups(t.topo, GroupFamily::ABCD);
  const GateErrorVector opt_rates = t.oracle.evaluate(optimized);
  const GateErrorVector rnd_rates =
      t.oracle.evaluate(random_baseline(t.topo, t.grid, derive_seed(kSeed, kRandomStream)));
  const int depth = 3;
  SpsaOptions noisy, clean;
  noisy.budget = 20000;
  clean.budget = 50000;

  bool ok = true;
  std::string rows;
  for (double g : {0.5, 1.0, 1.5}) {
    const auto t0 = Clock::now();
    const Tfim h{4, g};
    const double exact = exact_ground_energy(h);
    std::vector<int> ordered(10, 0);
    std::vector<std::thread> pool;
    for (int s = 0; s < 10; ++s) {
      pool.emplace_back([&, s] {
        const std::uint64_t seed = derive_seed(kSeed, kVqeStream, s);
        const AnsatzCircuit c = build_hea(t.topo, qubits, pattern, depth, seed);
        const double e_opt = run_vqe(c, h, opt_rates, seed, noisy).best_energy;
        const double e_rnd = run_vqe(c, h, rnd_rates, seed, noisy).best_energy;
        ordered[s] = e_opt <= e_rnd;
      });
    }
    for (std::thread& th : pool) th.join();
    const int count = std::count(ordered.begin(), ordered.end(), 1);

    const std::uint64_t seed = derive_seed(kSeed, kVqeStream);
    const AnsatzCircuit c = build_hea(t.topo, qubits, pattern, depth, seed);
    const double zero = run_vqe(c, h, {}, seed, clean).best_energy;
    const double secs = seconds_since(t0);
    const bool pass = count >= 8 && zero - exact <= 1e-3 && secs <= 300;
    ok = ok && pass;
    rows += fmt("\n    g %.1f  optimized <= random on %d/10 (>= 8), zero-noise gap %.2e (<= 1e-3), %.0f s (<= 300)",
                g, count, zero - exact, secs);
  }
  verdict(8, ok, fmt("n=4 plaquette, depth %d, noisy budget %d, zero-noise budget %d", depth, noisy.budget,
                     clean.budget) +
                     rows);
}

// --- 9 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void reproducibility() {
  const auto t0 = Clock::now();
  const fs::path base = fs::temp_directory_path() / "qfreq-acceptance";
  fs::remove_all(base);
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    const std::string dir = (base / run).string();
    const char* argv[] = {"qfreq",   "pipeline",  "--train-size", "500", "--test-size",  "100",
                          "--epochs", "3",        "--vqe-budget", "200", "--out-dir",    dir.c_str()};
    ran = ran && cli::run_cli(static_cast<int>(std::size(argv)), argv) == cli::kExitOk;
  }
  const cli::ArtifactPaths a{base / "a"}, b{base / "b"};
  bool identical = ran;
  std::string digests;
  for (auto f : {&cli::ArtifactPaths::train_set, &cli::ArtifactPaths::test_set, &cli::ArtifactPaths::model}) {
    const fs::path pa = (a.*f)(), pb = (b.*f)();
    identical = identical && fs::exists(pa) && slurp(pa) == slurp(pb);
    if (fs::exists(pa)) digests += " " + pa.filename().string() + "=" + file_digest(pa);
  }
  fs::remove_all(base);
  verdict(9, identical,
          fmt("5x5 pipeline run twice, dataset and checkpoint bytes %s:%s, %.0f s", identical ? "identical" : "DIFFER",
              digests.c_str(), seconds_since(t0)));
}

}  // namespace

int main() {
  Trained t;
  surrogate_quality(t);
  gradient_check();
  const FrequencyConfig optimized = optimizer_convergence(t);
  radius_study();
  strategy_ordering();
  matchings_engine();
  oracle_properties();
  vqe_ordering(t, optimized);
  reproducibility();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
