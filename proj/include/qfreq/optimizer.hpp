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
 * optimizer.hpp - window-based frequency configuration search.
 *
 * The search repeatedly picks the window with the largest average predicted
 * gate error and re-optimizes the frequencies inside it by cyclic coordinate
 * descent, each coordinate swept exhaustively over the grid. The objective of
 * a window move is the mean error over the window widened by one ring, so a
 * move cannot push error just outside its own boundary unnoticed.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfreq/chip.hpp"
#include "qfreq/frequency.hpp"
#include "qfreq/physics.hpp"
#include "qfreq/surrogate.hpp"

namespace qfreq {

class ErrorEstimator {
 public:
  virtual ~ErrorEstimator() = default;

  virtual std::string name() const = 0;
  virtual std::vector<double> predict_all(const FrequencyConfig& config) const = 0;

  /// out[c * gates.size() + j] = error of gates[j] with the frequency of
  /// `var` replaced by candidates[c], everything else as in `base`.
  virtual void sweep(const FrequencyConfig& base, GateIndex var, std::span<const double> candidates,
                     std::span<const GateIndex> gates, std::vector<double>& out) const = 0;
};

/// Exact oracle; sweeps recompute only the gates that depend on `var`.
class OracleEstimator final : public ErrorEstimator {
 public:
  explicit OracleEstimator(const GateErrorOracle& oracle) : oracle_(oracle) {}

  std::string name() const override { return "oracle"; }
  std::vector<double> predict_all(const FrequencyConfig& config) const override;
  void sweep(const FrequencyConfig& base, GateIndex var, std::span<const double> candidates,
             std::span<const GateIndex> gates, std::vector<double>& out) const override;

 private:
  const GateErrorOracle& oracle_;
};

/// Trained network. Sweep results are bit-identical to predict().
class SurrogateEstimator final : public ErrorEstimator {
 public:
  explicit SurrogateEstimator(const SurrogateModel& model, unsigned threads = 1)
      : model_(model), threads_(threads) {}

  std::string name() const override { return "surrogate"; }
  std::vector<double> predict_all(const FrequencyConfig& config) const override;
  void sweep(const FrequencyConfig& base, GateIndex var, std::span<const double> candidates,
             std::span<const GateIndex> gates, std::vector<double>& out) const override;

 private:
  const SurrogateModel& model_;
  unsigned threads_;
};

double window_avg_error(std::span<const double> errors, const Window& window);

struct WindowSearch {
  int max_sweeps = 3;
};

/*
 * Coordinate descent over `vars` (default: all gates of `window`) in index
 * order. Each coordinate moves to the grid argmin of the objective (lowest
 * frequency on ties) only when that strictly improves on the current value.
 * The objective is the mean estimated error over the gates of the window
 * widened by one ring.
 */
FrequencyConfig optimize_window(const ErrorEstimator& estimator, const ChipTopology& topology,
                                const FrequencyGrid& grid, const FrequencyConfig& config,
                                const Window& window, std::span<const GateIndex> vars = {},
                                const WindowSearch& search = {});

/// Mean estimated error over the window widened by one ring.
double window_objective(const ErrorEstimator& estimator, const ChipTopology& topology,
                        const FrequencyConfig& config, const Window& window);

struct IterationRecord {
  int iter = 0;                  // 1-based
  QubitIndex window_center = 0;
  double window_avg = 0;         // average predicted error of the selected window, before the move
  double mean_pred = 0;          // global mean predicted error after the iteration
  double mean_oracle = 0;        // NaN when no reference oracle was supplied
  bool accepted = false;
  std::string config_digest;
  std::optional<FrequencyConfig> config;  // config after the iteration
};

struct OptimizationTrace {
  std::string estimator;
  int radius = 0;
  std::uint64_t seed = 0;
  FrequencyConfig initial;
  std::vector<IterationRecord> iterations;
  FrequencyConfig final_config;
};

struct RunOptions {
  int radius = 2;
  int max_iter = 40;
  std::uint64_t seed = 0;
  double min_relative_improvement = 1e-4;
  WindowSearch search;
};

/*
 * Starts from sample_config(seed). Each iteration selects the window with the
 * largest average predicted error (lowest center on ties) and optimizes it.
 * The move is kept only if the global mean predicted error strictly drops;
 * the run stops at max_iter, on a rejected move, or when the relative drop
 * falls below min_relative_improvement.
 */
OptimizationTrace run(const ErrorEstimator& estimator, const ChipTopology& topology,
                      const FrequencyGrid& grid, const RunOptions& options,
                      const GateErrorOracle* reference = nullptr);

struct SnakeResult {
  FrequencyConfig config;
  std::vector<int> assignments;              // per gate, times its frequency was set
  std::vector<QubitIndex> centers;           // visiting order
  std::vector<FrequencyConfig> snapshots;    // config after each step
};

/// Boustrophedon single pass. Each step optimizes only the not yet assigned
/// gates of the window and then freezes them. Gates no window covers (only
/// couplers at radius 0) are settled one by one at the end.
SnakeResult greedy_snake(const ErrorEstimator& estimator, const ChipTopology& topology,
                         const FrequencyGrid& grid, int radius, std::uint64_t seed,
                         const WindowSearch& search = {});

std::vector<QubitIndex> snake_order(const ChipTopology& topology);

FrequencyConfig random_baseline(const ChipTopology& topology, const FrequencyGrid& grid, std::uint64_t seed);

double mean(std::span<const double> values);
std::string config_digest(const FrequencyConfig& config);

/// JSON lines, one record per iteration. Full configs are written every 10th
/// iteration and on the last one.
void write_trace(std::ostream& out, const OptimizationTrace& trace);
OptimizationTrace read_trace(std::istream& in, std::size_t num_qubits);

}  // namespace qfreq
