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
 * surrogate.hpp - position-embedded multilayer perceptron gate error model.
 *
 * For gate i under configuration w, the network input is
 *     normalize(w) + W_p e_i,
 * i.e. the normalized full-chip frequency vector plus column i of a trainable
 * D x D embedding. Two tanh hidden layers follow, and the scalar head is
 * squashed by a logistic into (0, 1).
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qfreq/chip.hpp"
#include "qfreq/dataset.hpp"
#include "qfreq/frequency.hpp"

namespace qfreq {

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string schedule = "adam, halve step and revert epoch on loss increase";
  std::string loss = "mse-log-error";
};

class SurrogateModel {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  SurrogateModel() = default;
  /// All parameters zero. `hidden` lists the hidden layer widths.
  SurrogateModel(std::size_t input_dim, std::vector<std::size_t> hidden, FrequencyGrid grid);

  /// Uniform fan-in initialization; embedding uniform in +-embedding_scale.
  static SurrogateModel initialized(std::size_t input_dim, std::vector<std::size_t> hidden,
                                    FrequencyGrid grid, std::uint64_t seed, double head_bias = 0.0,
                                    double embedding_scale = 1e-2);

  std::size_t input_dim() const { return input_dim_; }
  const std::vector<std::size_t>& hidden_widths() const { return hidden_; }
  std::size_t num_layers() const { return hidden_.size() + 1; }
  std::size_t layer_inputs(std::size_t l) const;
  std::size_t layer_outputs(std::size_t l) const;
  const FrequencyGrid& grid() const { return grid_; }
  std::string activation() const { return "tanh"; }

  TrainingMeta& meta() { return meta_; }
  const TrainingMeta& meta() const { return meta_; }

  ConstMatrixMap embedding() const;
  MatrixMap embedding();
  ConstMatrixMap weight(std::size_t l) const;
  MatrixMap weight(std::size_t l);
  ConstVectorMap bias(std::size_t l) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t l);

  /// Flat parameter vector: embedding, then per layer weights and bias, each
  /// column-major.
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t embedding_offset() const { return 0; }
  std::size_t weight_offset(std::size_t l) const { return offsets_.at(2 * l); }
  std::size_t bias_offset(std::size_t l) const { return offsets_.at(2 * l + 1); }

  /// Predicted error of gate `gate`; the config must lie on the model grid.
  double predict(const FrequencyConfig& config, GateIndex gate) const;
  /// Predictions for every gate, sharing one normalization pass.
  std::vector<double> predict_all(const FrequencyConfig& config) const;

  /// Head logits for `batch` prepared inputs (column-major D x batch, each
  /// column already normalize(config) + embedding column).
  void logits(const double* inputs, std::size_t batch, double* out) const;
  /// Same as logits() followed by the output map.
  void outputs(const double* inputs, std::size_t batch, double* out) const;

  /// Writes normalized + embedded input for `gate` into `column` (length D).
  void embed(std::span<const double> normalized, GateIndex gate, double* column) const;

  static double output_map(double logit);

  bool operator==(const SurrogateModel& other) const;

 private:
  void layout();

  std::size_t input_dim_ = 0;
  std::vector<std::size_t> hidden_;
  FrequencyGrid grid_;
  // Aligned so Eigen's kernel peeling, and with it the rounding, does not
  // depend on where the heap places the buffer.
  std::vector<double, Eigen::aligned_allocator<double>> params_;
  std::vector<std::size_t> offsets_;
  TrainingMeta meta_;
};

struct TrainHyper {
  std::vector<std::size_t> hidden;  // empty: two layers of width 4D
  int epochs = 40;
  std::size_t batch = 64;
  double step = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double embedding_scale = 1e-2;
};

struct EvalMetrics {
  double median_relative_error = 0;
  double median_absolute_error = 0;
  std::vector<std::pair<double, double>> scatter;  // (predicted, measured)
  std::vector<double> cdf_relative;                // sorted ascending
  std::vector<double> cdf_absolute;
};

struct EpochRecord {
  int epoch = 0;
  double step = 0;
  double loss = 0;          // full training loss after the epoch
  bool accepted = true;
};

struct TrainResult {
  SurrogateModel model;
  EvalMetrics train_metrics;
  std::vector<double> loss_trace;  // accepted loss after each epoch, non-increasing
  std::vector<EpochRecord> epochs;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, double step);
  int epoch() const { return epoch_; }
  double step() const { return step_; }

 private:
  int epoch_;
  double step_;
};

/// One training example: a normalized config, a gate, and log(measured error).
struct Sample {
  const double* normalized = nullptr;
  GateIndex gate = 0;
  double log_target = 0;
};

/// Mean of (log p - log_target)^2 over the samples; when `gradient` is
/// non-null it receives d(loss)/d(parameters) in parameters() layout.
double batch_loss(const SurrogateModel& model, std::span<const Sample> samples,
                  std::vector<double>* gradient = nullptr);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on every (config, gate) pair. Single-threaded and fully
/// determined by (data, hyper, seed).
TrainResult train(const Dataset& train_set, const TrainHyper& hyper, std::uint64_t seed,
                  const EpochCallback& on_epoch = {});

/// Metrics from paired predictions and measurements. Medians of even-sized
/// samples average the two middle values.
EvalMetrics compute_metrics(std::span<const double> predicted, std::span<const double> measured);
EvalMetrics evaluate(const SurrogateModel& model, const Dataset& data);

double median(std::vector<double> values);

/*
 * Checkpoint: "QFSM1", u64 D, u64 layer count, u64 width per layer (ending in
 * the 1-wide head), u64 activation name length and bytes, then little-endian
 * f64 arrays: W_p row-major, then per layer weights row-major and bias.
 */
void save_checkpoint(const std::filesystem::path& path, const SurrogateModel& model);
SurrogateModel load_checkpoint(const std::filesystem::path& path, const ChipTopology& topology,
                               const FrequencyGrid& grid);

}  // namespace qfreq
