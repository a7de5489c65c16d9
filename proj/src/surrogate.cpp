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

#include "qfreq/surrogate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "qfreq/dense.hpp"
#include "qfreq/digest.hpp"

namespace qfreq {

namespace {

constexpr char kMagic[5] = {'Q', 'F', 'S', 'M', '1'};
constexpr double kLogitClamp = 30.0;
constexpr std::size_t kInferenceBlock = 256;

// log(sigmoid(z)) without overflow.
double log_sigmoid(double z) {
  return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

struct Workspace {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> act;    // post-activation per hidden layer
  Eigen::RowVectorXd head;
  Eigen::MatrixXd delta, delta_prev;
};

// Mean squared log error over `samples`; accumulates the gradient into
// `grad` (already sized and zeroed) when non-null.
double loss_and_grad(const SurrogateModel& model, std::span<const Sample> samples, double* grad,
                     Workspace& ws) {
  const std::size_t n = samples.size();
  const std::size_t d = model.input_dim();
  const std::size_t hidden = model.num_layers() - 1;
  const auto wp = model.embedding();

  ws.input.resize(d, n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < d; ++k) {
      ws.input(k, s) = samples[s].normalized[k] + wp(k, samples[s].gate);
    }
  }
  ws.act.resize(hidden);
  const Eigen::MatrixXd* prev = &ws.input;
  for (std::size_t l = 0; l < hidden; ++l) {
    ws.act[l].noalias() = model.weight(l) * *prev;
    ws.act[l].colwise() += model.bias(l);
    for (double& v : ws.act[l].reshaped()) v = dense::tanh(v);
    prev = &ws.act[l];
  }
  ws.head.noalias() = model.weight(hidden) * *prev;
  ws.head.array() += model.bias(hidden)(0);

  double loss = 0;
  Eigen::RowVectorXd dz(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double z = ws.head(s);
    const double r = log_sigmoid(z) - samples[s].log_target;
    loss += r * r;
    // d log(sigmoid(z)) / dz = sigmoid(-z)
    dz(s) = 2.0 * r / static_cast<double>(n) / (1.0 + std::exp(z));
  }
  loss /= static_cast<double>(n);
  if (grad == nullptr) return loss;

  auto gmat = [&](std::size_t offset, std::size_t rows, std::size_t cols) {
    return Eigen::Map<Eigen::MatrixXd>(grad + offset, rows, cols);
  };
  const std::size_t last = hidden;
  gmat(model.weight_offset(last), 1, model.layer_inputs(last)).noalias() += dz * prev->transpose();
  grad[model.bias_offset(last)] += dz.sum();

  ws.delta.noalias() = model.weight(last).transpose() * dz;
  for (std::size_t l = hidden; l-- > 0;) {
    ws.delta.array() *= 1.0 - ws.act[l].array().square();
    const Eigen::MatrixXd& in = l == 0 ? ws.input : ws.act[l - 1];
    gmat(model.weight_offset(l), model.layer_outputs(l), model.layer_inputs(l)).noalias() +=
        ws.delta * in.transpose();
    gmat(model.bias_offset(l), model.layer_outputs(l), 1) += ws.delta.rowwise().sum();
    ws.delta_prev.noalias() = model.weight(l).transpose() * ws.delta;
    std::swap(ws.delta, ws.delta_prev);
  }
  // delta now holds d loss / d input; the embedding receives it per gate.
  auto gwp = gmat(model.embedding_offset(), d, d);
  for (std::size_t s = 0; s < n; ++s) gwp.col(samples[s].gate) += ws.delta.col(s);
  return loss;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

}  // namespace

// ---------------------------------------------------------------------------

SurrogateModel::SurrogateModel(std::size_t input_dim, std::vector<std::size_t> hidden, FrequencyGrid grid)
    : input_dim_(input_dim), hidden_(std::move(hidden)), grid_(grid) {
  if (input_dim_ == 0) throw std::invalid_argument("surrogate input dimension must be positive");
  for (std::size_t w : hidden_) {
    if (w == 0) throw std::invalid_argument("hidden layer widths must be positive");
  }
  layout();
}

void SurrogateModel::layout() {
  offsets_.clear();
  std::size_t at = input_dim_ * input_dim_;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    offsets_.push_back(at);
    at += layer_outputs(l) * layer_inputs(l);
    offsets_.push_back(at);
    at += layer_outputs(l);
  }
  params_.assign(at, 0.0);
}

SurrogateModel SurrogateModel::initialized(std::size_t input_dim, std::vector<std::size_t> hidden,
                                           FrequencyGrid grid, std::uint64_t seed, double head_bias,
                                           double embedding_scale) {
  SurrogateModel m(input_dim, std::move(hidden), grid);
  std::mt19937_64 rng(derive_seed(seed, 0x696e6974ull));
  auto uniform = [&](double scale) {
    // 53-bit uniform in [-scale, scale), independent of the library's distributions.
    return scale * (2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0);
  };
  auto p = m.parameters();
  for (std::size_t i = 0; i < input_dim * input_dim; ++i) p[i] = uniform(embedding_scale);
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.layer_inputs(l)));
    const std::size_t w = m.weight_offset(l);
    for (std::size_t i = 0; i < m.layer_outputs(l) * m.layer_inputs(l); ++i) p[w + i] = uniform(scale);
    const std::size_t b = m.bias_offset(l);
    for (std::size_t i = 0; i < m.layer_outputs(l); ++i) p[b + i] = uniform(scale);
  }
  p[m.bias_offset(m.num_layers() - 1)] = head_bias;
  return m;
}

std::size_t SurrogateModel::layer_inputs(std::size_t l) const {
  return l == 0 ? input_dim_ : hidden_.at(l - 1);
}

std::size_t SurrogateModel::layer_outputs(std::size_t l) const {
  return l < hidden_.size() ? hidden_[l] : 1;
}

SurrogateModel::ConstMatrixMap SurrogateModel::embedding() const {
  return ConstMatrixMap(params_.data(), input_dim_, input_dim_);
}
SurrogateModel::MatrixMap SurrogateModel::embedding() {
  return MatrixMap(params_.data(), input_dim_, input_dim_);
}
SurrogateModel::ConstMatrixMap SurrogateModel::weight(std::size_t l) const {
  return ConstMatrixMap(params_.data() + weight_offset(l), layer_outputs(l), layer_inputs(l));
}
SurrogateModel::MatrixMap SurrogateModel::weight(std::size_t l) {
  return MatrixMap(params_.data() + weight_offset(l), layer_outputs(l), layer_inputs(l));
}
SurrogateModel::ConstVectorMap SurrogateModel::bias(std::size_t l) const {
  return ConstVectorMap(params_.data() + bias_offset(l), layer_outputs(l));
}
Eigen::Map<Eigen::VectorXd> SurrogateModel::bias(std::size_t l) {
  return Eigen::Map<Eigen::VectorXd>(params_.data() + bias_offset(l), layer_outputs(l));
}

double SurrogateModel::output_map(double logit) {
  const double z = std::clamp(logit, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-z));
}

void SurrogateModel::embed(std::span<const double> normalized, GateIndex gate, double* column) const {
  const double* wp = params_.data() + gate * input_dim_;
  for (std::size_t k = 0; k < input_dim_; ++k) column[k] = normalized[k] + wp[k];
}

void SurrogateModel::logits(const double* inputs, std::size_t batch, double* out) const {
  std::size_t widest = input_dim_;
  for (std::size_t w : hidden_) widest = std::max(widest, w);
  std::vector<double> a(widest * std::min(batch, kInferenceBlock));
  std::vector<double> b(a.size());
  for (std::size_t j = 0; j < batch; j += kInferenceBlock) {
    const std::size_t cols = std::min(kInferenceBlock, batch - j);
    const double* cur = inputs + j * input_dim_;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const std::size_t rows = layer_outputs(l);
      double* dst = l + 1 == num_layers() ? out + j : (cur == a.data() ? b.data() : a.data());
      dense::affine(params_.data() + weight_offset(l), params_.data() + bias_offset(l), rows,
                    layer_inputs(l), cur, cols, dst);
      if (l + 1 < num_layers()) dense::tanh_inplace({dst, rows * cols});
      cur = dst;
    }
  }
}

void SurrogateModel::outputs(const double* inputs, std::size_t batch, double* out) const {
  logits(inputs, batch, out);
  for (std::size_t j = 0; j < batch; ++j) out[j] = output_map(out[j]);
}

double SurrogateModel::predict(const FrequencyConfig& config, GateIndex gate) const {
  if (gate >= input_dim_) throw std::out_of_range("gate index " + std::to_string(gate) + " out of range");
  if (config.size() != input_dim_) throw std::invalid_argument("config size does not match model input");
  const std::vector<double> x = normalize(config, grid_);
  std::vector<double> column(input_dim_);
  embed(x, gate, column.data());
  double out = 0;
  outputs(column.data(), 1, &out);
  return out;
}

std::vector<double> SurrogateModel::predict_all(const FrequencyConfig& config) const {
  if (config.size() != input_dim_) throw std::invalid_argument("config size does not match model input");
  const std::vector<double> x = normalize(config, grid_);
  std::vector<double> inputs(input_dim_ * input_dim_);
  for (std::size_t g = 0; g < input_dim_; ++g) embed(x, g, inputs.data() + g * input_dim_);
  std::vector<double> out(input_dim_);
  outputs(inputs.data(), input_dim_, out.data());
  return out;
}

bool SurrogateModel::operator==(const SurrogateModel& other) const {
  return input_dim_ == other.input_dim_ && hidden_ == other.hidden_ && grid_ == other.grid_ &&
         params_ == other.params_;
}

// ---------------------------------------------------------------------------

TrainingDiverged::TrainingDiverged(int epoch, double step)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "training diverged: non-finite loss in epoch " << epoch << " at step size " << step;
        return os.str();
      }()),
      epoch_(epoch),
      step_(step) {}

double batch_loss(const SurrogateModel& model, std::span<const Sample> samples, std::vector<double>* gradient) {
  if (samples.empty()) throw std::invalid_argument("empty sample batch");
  Workspace ws;
  if (gradient == nullptr) return loss_and_grad(model, samples, nullptr, ws);
  std::vector<double, Eigen::aligned_allocator<double>> aligned(model.parameters().size(), 0.0);
  const double loss = loss_and_grad(model, samples, aligned.data(), ws);
  gradient->assign(aligned.begin(), aligned.end());
  return loss;
}

namespace {

// Full-set loss through the inference kernel.
double full_loss(const SurrogateModel& model, const std::vector<std::vector<double>>& normalized,
                 const Dataset& data) {
  const std::size_t d = model.input_dim();
  std::vector<double> inputs(d * d), z(d);
  double total = 0;
  for (std::size_t c = 0; c < normalized.size(); ++c) {
    for (std::size_t g = 0; g < d; ++g) model.embed(normalized[c], g, inputs.data() + g * d);
    model.logits(inputs.data(), d, z.data());
    for (std::size_t g = 0; g < d; ++g) {
      const double r = log_sigmoid(z[g]) - std::log(data.labels[c][g]);
      total += r * r;
    }
  }
  return total / static_cast<double>(normalized.size() * d);
}

}  // namespace

TrainResult train(const Dataset& train_set, const TrainHyper& hyper, std::uint64_t seed,
                  const EpochCallback& on_epoch) {
  if (train_set.size() == 0) throw std::invalid_argument("training set is empty");
  if (hyper.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (hyper.batch == 0) throw std::invalid_argument("batch size must be positive");
  if (!(hyper.step > 0)) throw std::invalid_argument("step size must be positive");

  const std::size_t d = train_set.gate_count();
  const FrequencyGrid& grid = train_set.provenance.grid;
  std::vector<std::size_t> widths = hyper.hidden;
  if (widths.empty()) widths = {4 * d, 4 * d};

  std::vector<std::vector<double>> normalized;
  normalized.reserve(train_set.size());
  double log_sum = 0;
  for (std::size_t c = 0; c < train_set.size(); ++c) {
    if (train_set.labels[c].size() != d) throw std::invalid_argument("label row length mismatch");
    normalized.push_back(normalize(train_set.configs[c], grid));
    for (double e : train_set.labels[c]) {
      if (!(e > 0 && e < 1)) throw std::invalid_argument("labels must lie in (0, 1)");
      log_sum += std::log(e);
    }
  }
  const double gmean = std::exp(log_sum / static_cast<double>(train_set.size() * d));
  SurrogateModel model = SurrogateModel::initialized(d, widths, grid, seed, std::log(gmean / (1 - gmean)),
                                                     hyper.embedding_scale);
  model.meta().seed = seed;
  model.meta().epochs = hyper.epochs;

  const std::size_t pairs = train_set.size() * d;
  std::vector<std::uint32_t> order(pairs);
  for (std::size_t i = 0; i < pairs; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::mt19937_64 shuffle_rng(derive_seed(seed, 0x73687566ull));

  const std::size_t np = model.parameters().size();
  std::vector<double> m(np, 0.0), v(np, 0.0);
  std::vector<double, Eigen::aligned_allocator<double>> grad(np);
  std::uint64_t t = 0;
  double step = hyper.step;

  TrainResult result;
  double accepted_loss = full_loss(model, normalized, train_set);
  if (!std::isfinite(accepted_loss)) throw TrainingDiverged(0, step);

  Workspace ws;
  std::vector<Sample> batch;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    const std::vector<double> snap_params(model.parameters().begin(), model.parameters().end());
    const std::vector<double> snap_m = m, snap_v = v;
    const std::uint64_t snap_t = t;

    for (std::size_t i = pairs; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng() % i]);
    }
    for (std::size_t start = 0; start < pairs; start += hyper.batch) {
      const std::size_t end = std::min(pairs, start + hyper.batch);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t c = order[k] / d, g = order[k] % d;
        batch.push_back({normalized[c].data(), g, std::log(train_set.labels[c][g])});
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = loss_and_grad(model, batch, grad.data(), ws);
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch, step);

      ++t;
      const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
      auto p = model.parameters();
      for (std::size_t i = 0; i < np; ++i) {
        m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * grad[i];
        v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
        p[i] -= step * (m[i] / c1) / (std::sqrt(v[i] / c2) + hyper.adam_eps);
      }
    }

    const double loss = full_loss(model, normalized, train_set);
    if (!std::isfinite(loss)) throw TrainingDiverged(epoch, step);
    EpochRecord rec{epoch, step, loss, loss <= accepted_loss};
    if (rec.accepted) {
      accepted_loss = loss;
    } else {
      std::copy(snap_params.begin(), snap_params.end(), model.parameters().begin());
      m = snap_m;
      v = snap_v;
      t = snap_t;
      step *= 0.5;
    }
    result.loss_trace.push_back(accepted_loss);
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  result.model = std::move(model);
  result.train_metrics = evaluate(result.model, train_set);
  return result;
}

// ---------------------------------------------------------------------------

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EvalMetrics compute_metrics(std::span<const double> predicted, std::span<const double> measured) {
  if (predicted.empty()) throw std::invalid_argument("cannot evaluate on an empty set");
  if (predicted.size() != measured.size()) throw std::invalid_argument("prediction/measurement size mismatch");
  EvalMetrics out;
  out.scatter.reserve(predicted.size());
  out.cdf_relative.reserve(predicted.size());
  out.cdf_absolute.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double diff = std::abs(predicted[i] - measured[i]);
    out.scatter.emplace_back(predicted[i], measured[i]);
    out.cdf_absolute.push_back(diff);
    out.cdf_relative.push_back(diff / measured[i]);
  }
  std::sort(out.cdf_relative.begin(), out.cdf_relative.end());
  std::sort(out.cdf_absolute.begin(), out.cdf_absolute.end());
  out.median_relative_error = median(out.cdf_relative);
  out.median_absolute_error = median(out.cdf_absolute);
  return out;
}

EvalMetrics evaluate(const SurrogateModel& model, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("cannot evaluate on an empty set");
  std::vector<double> predicted, measured;
  for (std::size_t c = 0; c < data.size(); ++c) {
    const auto p = model.predict_all(data.configs[c]);
    predicted.insert(predicted.end(), p.begin(), p.end());
    measured.insert(measured.end(), data.labels[c].begin(), data.labels[c].end());
  }
  return compute_metrics(predicted, measured);
}

// ---------------------------------------------------------------------------

void save_checkpoint(const std::filesystem::path& path, const SurrogateModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::size_t d = model.input_dim();
  write_u64(out, d);
  write_u64(out, model.num_layers());
  for (std::size_t l = 0; l < model.num_layers(); ++l) write_u64(out, model.layer_outputs(l));
  const std::string act = model.activation();
  write_u64(out, act.size());
  out.write(act.data(), static_cast<std::streamsize>(act.size()));

  auto row_major = [&](const SurrogateModel::ConstMatrixMap& mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) write_f64(out, mat(r, c));
    }
  };
  row_major(model.embedding());
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    row_major(model.weight(l));
    for (double b : model.bias(l)) write_f64(out, b);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

SurrogateModel load_checkpoint(const std::filesystem::path& path, const ChipTopology& topology,
                               const FrequencyGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path.string() + " is not a QFSM1 checkpoint");
  }
  const std::uint64_t d = read_u64(in);
  if (d != topology.num_gates()) {
    throw std::runtime_error("checkpoint input dimension " + std::to_string(d) + " does not match the " +
                             std::to_string(topology.num_gates()) + "-gate topology");
  }
  const std::uint64_t layers = read_u64(in);
  if (layers == 0 || layers > 64) throw std::runtime_error("implausible checkpoint layer count");
  std::vector<std::size_t> widths(layers);
  for (auto& w : widths) w = read_u64(in);
  if (widths.back() != 1) throw std::runtime_error("checkpoint head must be 1 wide");
  const std::uint64_t name_len = read_u64(in);
  if (name_len > 64) throw std::runtime_error("implausible activation name");
  std::string act(name_len, '\0');
  if (!in.read(act.data(), static_cast<std::streamsize>(name_len))) throw std::runtime_error("truncated checkpoint");
  if (act != "tanh") throw std::runtime_error("unsupported activation '" + act + "'");

  widths.pop_back();
  SurrogateModel model(d, widths, grid);
  auto row_major = [&](SurrogateModel::MatrixMap mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) mat(r, c) = read_f64(in);
    }
  };
  row_major(model.embedding());
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    row_major(model.weight(l));
    for (double& b : model.bias(l)) b = read_f64(in);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("trailing bytes in checkpoint");
  return model;
}

}  // namespace qfreq
