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

#include "qfreq/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qfreq/dataset.hpp"
#include "qfreq/digest.hpp"
#include "qfreq/parallel.hpp"

namespace qfreq {

std::vector<double> OracleEstimator::predict_all(const FrequencyConfig& config) const {
  return oracle_.evaluate(config);
}

void OracleEstimator::sweep(const FrequencyConfig& base, GateIndex var, std::span<const double> candidates,
                            std::span<const GateIndex> gates, std::vector<double>& out) const {
  const std::size_t n = gates.size();
  out.assign(candidates.size() * n, 0.0);
  std::vector<double> f(base.values().begin(), base.values().end());
  std::vector<char> touched(f.size(), 0);
  for (GateIndex g : oracle_.affected_gates(var)) touched[g] = 1;

  for (std::size_t j = 0; j < n; ++j) {
    if (touched[gates[j]]) continue;
    const double e = oracle_.gate_error(f, gates[j]);
    for (std::size_t c = 0; c < candidates.size(); ++c) out[c * n + j] = e;
  }
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    f[var] = candidates[c];
    for (std::size_t j = 0; j < n; ++j) {
      if (touched[gates[j]]) out[c * n + j] = oracle_.gate_error(f, gates[j]);
    }
  }
}

std::vector<double> SurrogateEstimator::predict_all(const FrequencyConfig& config) const {
  return model_.predict_all(config);
}

void SurrogateEstimator::sweep(const FrequencyConfig& base, GateIndex var, std::span<const double> candidates,
                               std::span<const GateIndex> gates, std::vector<double>& out) const {
  const std::size_t d = model_.input_dim();
  const std::size_t n = gates.size();
  const FrequencyGrid& grid = model_.grid();
  for (double w : candidates) grid.index_of(w);
  const std::vector<double> x = normalize(base, grid);
  out.assign(candidates.size() * n, 0.0);

  // Contiguous candidate chunks per worker; each column is computed the same
  // way whatever chunk it lands in.
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads_, candidates.size()));
  parallel_for(chunks, threads_, [&](std::size_t w) {
    const std::size_t begin = candidates.size() * w / chunks;
    const std::size_t end = candidates.size() * (w + 1) / chunks;
    std::vector<double> xc = x;
    std::vector<double> inputs((end - begin) * n * d);
    for (std::size_t c = begin; c < end; ++c) {
      xc[var] = grid.normalize(candidates[c]);
      for (std::size_t j = 0; j < n; ++j) model_.embed(xc, gates[j], inputs.data() + ((c - begin) * n + j) * d);
    }
    model_.outputs(inputs.data(), (end - begin) * n, out.data() + begin * n);
  });
}

// ---------------------------------------------------------------------------

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty set");
  double s = 0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double window_avg_error(std::span<const double> errors, const Window& window) {
  if (window.gates.empty()) throw std::invalid_argument("window has no gates");
  double s = 0;
  for (GateIndex g : window.gates) {
    if (g >= errors.size()) throw std::out_of_range("window gate beyond the error vector");
    s += errors[g];
  }
  return s / static_cast<double>(window.gates.size());
}

namespace {

Window objective_window(const ChipTopology& topology, const Window& window) {
  return make_window(topology, window.center, window.radius + 1);
}

}  // namespace

double window_objective(const ErrorEstimator& estimator, const ChipTopology& topology,
                        const FrequencyConfig& config, const Window& window) {
  return window_avg_error(estimator.predict_all(config), objective_window(topology, window));
}

FrequencyConfig optimize_window(const ErrorEstimator& estimator, const ChipTopology& topology,
                                const FrequencyGrid& grid, const FrequencyConfig& config,
                                const Window& window, std::span<const GateIndex> vars,
                                const WindowSearch& search) {
  if (window.gates.empty()) throw std::invalid_argument("window has no gates");
  std::vector<GateIndex> order(vars.begin(), vars.end());
  if (order.empty()) order = window.gates;
  std::sort(order.begin(), order.end());
  for (GateIndex g : order) {
    if (!std::binary_search(window.gates.begin(), window.gates.end(), g)) {
      throw std::invalid_argument("gate " + std::to_string(g) + " is outside the window");
    }
  }
  const std::vector<GateIndex>& scope = objective_window(topology, window).gates;
  const std::vector<double> candidates = grid.values();
  const std::size_t n = scope.size();

  FrequencyConfig current = config;
  std::vector<double> errors;
  for (int sweep = 0; sweep < search.max_sweeps; ++sweep) {
    bool changed = false;
    for (GateIndex var : order) {
      estimator.sweep(current, var, candidates, scope, errors);
      const std::size_t here = grid.index_of(current[var]);
      std::vector<double> objective(candidates.size());
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) s += errors[c * n + j];
        objective[c] = s / static_cast<double>(n);
      }
      const std::size_t best =
          static_cast<std::size_t>(std::min_element(objective.begin(), objective.end()) - objective.begin());
      if (objective[best] < objective[here]) {
        current.set(var, candidates[best]);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return current;
}

// ---------------------------------------------------------------------------

std::string config_digest(const FrequencyConfig& config) { return hex64(fnv1a64(config.values())); }

OptimizationTrace run(const ErrorEstimator& estimator, const ChipTopology& topology, const FrequencyGrid& grid,
                      const RunOptions& options, const GateErrorOracle* reference) {
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  const std::vector<Window> windows = enumerate_windows(topology, options.radius);

  OptimizationTrace trace;
  trace.estimator = estimator.name();
  trace.radius = options.radius;
  trace.seed = options.seed;
  trace.initial = sample_config(topology, grid, options.seed);

  FrequencyConfig current = trace.initial;
  std::vector<double> pred = estimator.predict_all(current);
  double current_mean = mean(pred);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    std::size_t pick = 0;
    double pick_avg = -1;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      if (windows[w].gates.empty()) continue;
      const double avg = window_avg_error(pred, windows[w]);
      if (avg > pick_avg) {
        pick_avg = avg;
        pick = w;
      }
    }

    FrequencyConfig moved = optimize_window(estimator, topology, grid, current, windows[pick], {}, options.search);
    std::vector<double> moved_pred = estimator.predict_all(moved);
    const double moved_mean = mean(moved_pred);

    IterationRecord rec;
    rec.iter = iter;
    rec.window_center = windows[pick].center;
    rec.window_avg = pick_avg;
    rec.accepted = moved_mean < current_mean;
    const double gain = (current_mean - moved_mean) / current_mean;
    if (rec.accepted) {
      current = std::move(moved);
      pred = std::move(moved_pred);
      current_mean = moved_mean;
    }
    rec.mean_pred = current_mean;
    rec.mean_oracle = reference ? mean(reference->evaluate(current)) : std::numeric_limits<double>::quiet_NaN();
    rec.config_digest = config_digest(current);
    rec.config = current;
    trace.iterations.push_back(std::move(rec));
    if (!trace.iterations.back().accepted || gain < options.min_relative_improvement) break;
  }
  trace.final_config = current;
  return trace;
}

// ---------------------------------------------------------------------------

std::vector<QubitIndex> snake_order(const ChipTopology& topology) {
  std::vector<QubitIndex> out;
  for (int r = 0; r < topology.rows(); ++r) {
    for (int k = 0; k < topology.cols(); ++k) {
      const int c = r % 2 == 0 ? k : topology.cols() - 1 - k;
      out.push_back(topology.qubit_at(r, c));
    }
  }
  return out;
}

SnakeResult greedy_snake(const ErrorEstimator& estimator, const ChipTopology& topology, const FrequencyGrid& grid,
                         int radius, std::uint64_t seed, const WindowSearch& search) {
  SnakeResult res;
  res.config = sample_config(topology, grid, seed);
  res.assignments.assign(topology.num_gates(), 0);

  auto settle = [&](const Window& window, const std::vector<GateIndex>& vars) {
    if (vars.empty()) return;
    res.config = optimize_window(estimator, topology, grid, res.config, window, vars, search);
    for (GateIndex g : vars) ++res.assignments[g];
    res.snapshots.push_back(res.config);
  };

  for (QubitIndex center : snake_order(topology)) {
    const Window window = make_window(topology, center, radius);
    std::vector<GateIndex> open;
    for (GateIndex g : window.gates) {
      if (res.assignments[g] == 0) open.push_back(g);
    }
    res.centers.push_back(center);
    settle(window, open);
  }
  for (GateIndex g = 0; g < topology.num_gates(); ++g) {
    if (res.assignments[g] != 0) continue;
    const QubitIndex q = topology.gate_qubits(g).q[0];
    settle(make_window(topology, q, 1), {g});
  }
  return res;
}

FrequencyConfig random_baseline(const ChipTopology& topology, const FrequencyGrid& grid, std::uint64_t seed) {
  return sample_config(topology, grid, seed);
}

// ---------------------------------------------------------------------------

void write_trace(std::ostream& out, const OptimizationTrace& trace) {
  const std::size_t n = trace.iterations.size();
  for (std::size_t i = 0; i < n; ++i) {
    const IterationRecord& r = trace.iterations[i];
    nlohmann::json line = {{"iter", r.iter},
                           {"window_center", r.window_center},
                           {"window_avg", r.window_avg},
                           {"mean_pred", r.mean_pred},
                           {"mean_oracle", std::isnan(r.mean_oracle) ? nlohmann::json() : nlohmann::json(r.mean_oracle)},
                           {"config_digest", r.config_digest},
                           {"accepted", r.accepted},
                           {"radius", trace.radius},
                           {"estimator", trace.estimator},
                           {"seed", trace.seed}};
    if (r.config && (r.iter % 10 == 0 || i + 1 == n)) line["config"] = config_to_json(*r.config);
    out << line.dump() << '\n';
  }
}

OptimizationTrace read_trace(std::istream& in, std::size_t num_qubits) {
  OptimizationTrace trace;
  std::string text;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    const auto line = nlohmann::json::parse(text);
    IterationRecord r;
    r.iter = line.at("iter").get<int>();
    r.window_center = line.at("window_center").get<QubitIndex>();
    r.window_avg = line.at("window_avg").get<double>();
    r.mean_pred = line.at("mean_pred").get<double>();
    r.mean_oracle = line.at("mean_oracle").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                     : line.at("mean_oracle").get<double>();
    r.config_digest = line.at("config_digest").get<std::string>();
    r.accepted = line.at("accepted").get<bool>();
    trace.radius = line.at("radius").get<int>();
    trace.estimator = line.at("estimator").get<std::string>();
    trace.seed = line.at("seed").get<std::uint64_t>();
    if (line.contains("config")) {
      r.config = config_from_json(line.at("config"));
      if (r.config->num_qubits() != num_qubits) throw std::runtime_error("trace config has the wrong qubit count");
      trace.final_config = *r.config;
    }
    trace.iterations.push_back(std::move(r));
  }
  return trace;
}

}  // namespace qfreq
