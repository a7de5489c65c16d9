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

#include "qfreq/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfreq/chip.hpp"
#include "qfreq/cli/report.hpp"
#include "qfreq/dataset.hpp"
#include "qfreq/digest.hpp"
#include "qfreq/optimizer.hpp"
#include "qfreq/physics.hpp"
#include "qfreq/surrogate.hpp"
#include "qfreq/vqe.hpp"

namespace qfreq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDataStream = 0x64617461ull;
constexpr std::uint64_t kTrainStream = 0x6d6f64656cull;
constexpr std::uint64_t kRandomStream = 0x72616e64ull;
constexpr std::uint64_t kVqeStream = 0x767165ull;

constexpr double kVqeFields[] = {0.5, 1.0, 1.5};

class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, int code, const std::string& cause)
      : std::runtime_error(cause), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

template <class Fn>
void run_stage(const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const StageFailure&) {
    throw;
  } catch (const ValidationError& e) {
    throw StageFailure(name, kExitInvalid, e.what());
  } catch (const std::invalid_argument& e) {
    throw StageFailure(name, kExitInvalid, e.what());
  } catch (const std::out_of_range& e) {
    throw StageFailure(name, kExitInvalid, e.what());
  } catch (const json::exception& e) {
    throw StageFailure(name, kExitInvalid, e.what());
  } catch (const TrainingDiverged& e) {
    throw StageFailure(name, kExitAbort, e.what());
  } catch (const std::exception& e) {
    throw StageFailure(name, kExitAbort, e.what());
  }
}

void log(const char* stage, const std::string& msg) { std::cerr << '[' << stage << "] " << msg << '\n'; }

ArtifactPaths paths(const Options& o) {
  fs::create_directories(o.out_dir);
  return ArtifactPaths{o.out_dir};
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  write_artifact(path, [&](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + p.string());
  });
}

void write_json(const fs::path& path, const json& doc) {
  write_text(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing artifact " + path.string());
  return json::parse(in);
}

void require(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("missing artifact " + path.string());
}

ChipTopology load_topology(const Options& o, const ArtifactPaths& p) {
  ChipTopology topo = chip_from_json(read_json(p.chip()));
  if (topo.rows() != o.rows || topo.cols() != o.cols) {
    throw ValidationError("chip in " + p.chip().string() + " is " + std::to_string(topo.rows()) + "x" +
                          std::to_string(topo.cols()) + ", but --rows/--cols ask for " + std::to_string(o.rows) +
                          "x" + std::to_string(o.cols));
  }
  return topo;
}

GateErrorOracle load_oracle(const Options& o, const ArtifactPaths& p) {
  ChipTopology topo = load_topology(o, p);
  ChipPhysics physics = physics_from_json(read_json(p.physics()));
  const FrequencyGrid grid = o.grid();
  validate_physics(topo, grid, physics);
  return GateErrorOracle(std::move(physics), std::move(topo), grid);
}

FrequencyConfig load_config(const fs::path& path, const GateErrorOracle& oracle) {
  FrequencyConfig c = config_from_json(read_json(path));
  validate_config(oracle.topology(), oracle.grid(), c);
  return c;
}

void check_provenance(const Dataset& d, const Options& o, const fs::path& path) {
  if (d.provenance.rows != o.rows || d.provenance.cols != o.cols || !(d.provenance.grid == o.grid()) ||
      d.provenance.physics_seed != o.seed) {
    throw ValidationError(path.string() + " was generated for another chip, grid or seed");
  }
}

/// Owns whichever estimator the options select.
struct EstimatorHandle {
  std::optional<SurrogateModel> model;
  std::unique_ptr<ErrorEstimator> estimator;
  std::string model_digest;
};

EstimatorHandle make_estimator(const Options& o, const ArtifactPaths& p, const GateErrorOracle& oracle) {
  EstimatorHandle h;
  if (o.estimator == "oracle") {
    h.estimator = std::make_unique<OracleEstimator>(oracle);
  } else {
    require(p.model());
    h.model.emplace(load_checkpoint(p.model(), oracle.topology(), oracle.grid()));
    h.model_digest = file_digest(p.model());
    h.estimator = std::make_unique<SurrogateEstimator>(*h.model, o.threads);
  }
  return h;
}

std::uint64_t random_seed(const Options& o) { return derive_seed(o.seed, kRandomStream); }

json seeds_json(const Options& o) {
  return {{"master", o.seed},
          {"physics", o.seed},
          {"dataset", derive_seed(o.seed, kDataStream)},
          {"train", derive_seed(o.seed, kTrainStream)},
          {"optimizer", o.seed},
          {"random_baseline", random_seed(o)},
          {"vqe", derive_seed(o.seed, kVqeStream)}};
}

json eval_json(const EvalMetrics& m, std::size_t configs) {
  return {{"configs", configs},
          {"pairs", m.scatter.size()},
          {"median_relative_error", m.median_relative_error},
          {"median_absolute_error", m.median_absolute_error}};
}

}  // namespace

void write_artifact(const fs::path& path, const std::function<void(const fs::path&)>& write) {
  fs::path partial = path;
  partial += ".partial";
  write(partial);
  fs::rename(partial, path);
}

void cmd_chip(const Options& o) {
  const ArtifactPaths p = paths(o);
  const ChipTopology topo = build_grid(o.rows, o.cols);
  write_json(p.chip(), chip_to_json(topo));
  log("chip", std::to_string(topo.num_qubits()) + " qubits, " + std::to_string(topo.num_couplers()) +
                  " couplers, " + std::to_string(topo.num_gates()) + " gates");
}

void cmd_physics(const Options& o) {
  const ArtifactPaths p = paths(o);
  const ChipTopology topo = load_topology(o, p);
  const ChipPhysics physics = sample_chip_physics(topo, o.seed, o.grid());
  write_json(p.physics(), physics_to_json(physics));
  // The long-range crosstalk pairs belong in the chip document too.
  const std::vector<QubitPair> pairs = physics.crosstalk_pairs();
  write_json(p.chip(), chip_to_json(topo.with_crosstalk_pairs(pairs)));
  log("physics", "seed " + std::to_string(o.seed) + ", " + std::to_string(physics.crosstalk.size()) +
                     " crosstalk entries");
}

void cmd_dataset(const Options& o) {
  const ArtifactPaths p = paths(o);
  const GateErrorOracle oracle = load_oracle(o, p);
  auto [train_set, test_set] =
      generate_dataset(oracle, o.train_size, o.test_size, derive_seed(o.seed, kDataStream), o.threads);
  write_artifact(p.train_set(), [&](const fs::path& f) { save_dataset(f, train_set); });
  write_artifact(p.test_set(), [&](const fs::path& f) { save_dataset(f, test_set); });
  log("dataset", std::to_string(train_set.configs.size()) + " train / " + std::to_string(test_set.configs.size()) +
                     " test configurations");
}

void cmd_train(const Options& o) {
  const ArtifactPaths p = paths(o);
  require(p.train_set());
  const Dataset train_set = load_dataset(p.train_set());
  check_provenance(train_set, o, p.train_set());

  TrainHyper hyper;
  hyper.epochs = o.epochs;
  if (o.hidden > 0) hyper.hidden = {static_cast<std::size_t>(o.hidden), static_cast<std::size_t>(o.hidden)};
  const std::uint64_t seed = derive_seed(o.seed, kTrainStream);
  TrainResult r = train(train_set, hyper, seed, [](const EpochRecord& e) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "epoch %d step %.2e loss %.6f%s", e.epoch, e.step, e.loss,
                  e.accepted ? "" : " (reverted)");
    log("train", buf);
  });
  write_artifact(p.model(), [&](const fs::path& f) { save_checkpoint(f, r.model); });

  json epochs = json::array();
  for (const EpochRecord& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"step", e.step}, {"loss", e.loss}, {"accepted", e.accepted}});
  }
  json doc = {{"seed", seed},
              {"hidden", r.model.hidden_widths()},
              {"activation", r.model.activation()},
              {"loss", r.model.meta().loss},
              {"schedule", r.model.meta().schedule},
              {"loss_trace", r.loss_trace},
              {"epochs", epochs},
              {"train", eval_json(r.train_metrics, train_set.configs.size())},
              {"model_digest", file_digest(p.model())}};
  write_json(p.train_log(), doc);
  log("train", "train median relative error " + std::to_string(r.train_metrics.median_relative_error));
}

void cmd_eval(const Options& o) {
  const ArtifactPaths p = paths(o);
  require(p.test_set());
  require(p.model());
  const Dataset test_set = load_dataset(p.test_set());
  check_provenance(test_set, o, p.test_set());
  const ChipTopology topo = load_topology(o, p);
  const SurrogateModel model = load_checkpoint(p.model(), topo, o.grid());
  const EvalMetrics m = evaluate(model, test_set);

  json doc = eval_json(m, test_set.configs.size());
  doc["model_digest"] = file_digest(p.model());
  doc["test_set_digest"] = file_digest(p.test_set());
  write_json(p.eval(), doc);
  write_text(p.eval_cdf(), [&](std::ostream& out) {
    out << "metric,error,cumulative\n";
    char buf[64];
    for (const auto& [name, values] : {std::pair{"relative", &m.cdf_relative}, std::pair{"absolute", &m.cdf_absolute}}) {
      const Cdf cdf = make_cdf(*values);
      for (std::size_t k = 0; k < cdf.values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6e,%.6f", cdf.values[k], cdf.cumulative[k]);
        out << name << ',' << buf << '\n';
      }
    }
  });
  log("eval", "test median relative error " + std::to_string(m.median_relative_error) + ", absolute " +
                  std::to_string(m.median_absolute_error));
}

void cmd_optimize(const Options& o) {
  const ArtifactPaths p = paths(o);
  const GateErrorOracle oracle = load_oracle(o, p);
  const EstimatorHandle h = make_estimator(o, p, oracle);
  RunOptions ro;
  ro.radius = o.radius;
  ro.max_iter = o.max_iter;
  ro.seed = o.seed;
  const OptimizationTrace trace = run(*h.estimator, oracle.topology(), oracle.grid(), ro, &oracle);
  write_text(p.trace(), [&](std::ostream& out) { write_trace(out, trace); });
  write_json(p.optimized(), config_to_json(trace.final_config));

  char buf[160];
  const IterationRecord& last = trace.iterations.back();
  std::snprintf(buf, sizeof buf, "%zu iterations, mean predicted %.4e, mean oracle %.4e", trace.iterations.size(),
                last.mean_pred, last.mean_oracle);
  log("optimize", buf);
}

void cmd_bench(const Options& o) {
  const ArtifactPaths p = paths(o);
  const GateErrorOracle oracle = load_oracle(o, p);
  const FrequencyConfig optimized = load_config(p.optimized(), oracle);
  const EstimatorHandle h = make_estimator(o, p, oracle);
  const SnakeResult snake = greedy_snake(*h.estimator, oracle.topology(), oracle.grid(), o.radius, o.seed);
  const FrequencyConfig random = random_baseline(oracle.topology(), oracle.grid(), random_seed(o));
  write_json(p.greedy(), config_to_json(snake.config));
  write_json(p.random(), config_to_json(random));

  json prov = {{"seeds", seeds_json(o)},
               {"chip", {{"rows", o.rows}, {"cols", o.cols}}},
               {"grid", grid_to_json(oracle.grid())},
               {"estimator", h.estimator->name()},
               {"radius", o.radius},
               {"max_iter", o.max_iter},
               {"physics_digest", file_digest(p.physics())},
               {"optimized_config_digest", config_digest(optimized)},
               {"model_digest", h.model_digest.empty() ? json(nullptr) : json(h.model_digest)}};
  const RunReport report = make_run_report(oracle, optimized, snake.config, random, std::move(prov));
  write_json(p.report(), report_to_json(report));
  write_text(p.report_cdf(), [&](std::ostream& out) { write_cdf_csv(out, report); });
  std::cout << comparison_table(report);
}

void cmd_vqe(const Options& o) {
  const ArtifactPaths p = paths(o);
  const GateErrorOracle oracle = load_oracle(o, p);
  const FrequencyConfig optimized = load_config(p.optimized(), oracle);
  const FrequencyConfig random = random_baseline(oracle.topology(), oracle.grid(), random_seed(o));
  const ChipTopology& topo = oracle.topology();

  // A 2x2 plaquette near the chip center, or a line on single-row chips.
  std::vector<QubitIndex> qubits;
  if (o.rows >= 2 && o.cols >= 2) {
    qubits = block_path(topo, (o.rows - 2) / 2, (o.cols - 2) / 2, 2, 2);
  } else if (o.rows == 1) {
    qubits = block_path(topo, 0, 0, 1, std::min(o.cols, 4));
  } else {
    qubits = block_path(topo, 0, 0, std::min(o.rows, 4), 1);
  }
  const GroupFamily family = group_family_from_string(o.pattern);
  const std::uint64_t seed = derive_seed(o.seed, kVqeStream);
  const AnsatzCircuit circuit = build_hea(topo, qubits, assign_groups(topo, family), o.vqe_depth, seed);
  const GateErrorVector opt_rates = oracle.evaluate(optimized);
  const GateErrorVector rand_rates = oracle.evaluate(random);

  SpsaOptions spsa;
  spsa.budget = o.vqe_budget;
  json runs = json::array();
  for (double g : kVqeFields) {
    const Tfim h{circuit.n_qubits(), g};
    const double exact = exact_ground_energy(h);
    for (const auto& [source, rates] : {std::pair{"optimized", std::span<const double>(opt_rates)},
                                        std::pair{"random", std::span<const double>(rand_rates)},
                                        std::pair{"zero", std::span<const double>()}}) {
      const VqeResult r = run_vqe(circuit, h, rates, seed, spsa);
      VqeRecord rec{circuit.n_qubits(), g, o.vqe_depth, to_string(family), source, r.best_energy, exact,
                    r.evaluations};
      runs.push_back(vqe_record_to_json(rec));
      char buf[128];
      std::snprintf(buf, sizeof buf, "g %.1f %-9s best %.6f exact %.6f", g, source, r.best_energy, exact);
      log("vqe", buf);
    }
  }
  json doc = {{"qubits", qubits},
              {"runs", runs},
              {"spsa", {{"budget", spsa.budget}, {"a", spsa.a}, {"c", spsa.c}, {"alpha", spsa.alpha},
                        {"gamma", spsa.gamma}}},
              {"seeds", seeds_json(o)},
              {"optimized_config_digest", config_digest(optimized)},
              {"random_config_digest", config_digest(random)}};
  write_json(p.vqe(), doc);
}

void cmd_pipeline(const Options& o) {
  run_stage("chip", [&] { cmd_chip(o); });
  run_stage("physics", [&] { cmd_physics(o); });
  run_stage("dataset", [&] { cmd_dataset(o); });
  // The surrogate is only needed when it drives the search.
  if (o.estimator == "surrogate") {
    run_stage("train", [&] { cmd_train(o); });
    run_stage("eval", [&] { cmd_eval(o); });
  }
  run_stage("optimize", [&] { cmd_optimize(o); });
  run_stage("bench", [&] { cmd_bench(o); });
  run_stage("vqe", [&] { cmd_vqe(o); });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"qfreq: surrogate-guided frequency configuration for tunable-coupler chips"};
  app.fallthrough();
  Options options;
  add_options(app, options);
  app.require_subcommand(1);

  using Command = void (*)(const Options&);
  const std::pair<const char*, std::pair<const char*, Command>> commands[] = {
      {"chip", {"Write the chip topology", cmd_chip}},
      {"physics", {"Sample the synthetic chip physics", cmd_physics}},
      {"dataset", {"Generate labeled train/test configurations", cmd_dataset}},
      {"train", {"Train the surrogate", cmd_train}},
      {"eval", {"Evaluate the surrogate on the test split", cmd_eval}},
      {"optimize", {"Run the window search", cmd_optimize}},
      {"bench", {"Compare optimized, greedy-snake and random configurations", cmd_bench}},
      {"vqe", {"Noisy VQE under optimized, random and zero noise", cmd_vqe}},
      {"pipeline", {"Run every stage in order", cmd_pipeline}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    validate(options);
    for (const auto& [name, entry] : commands) {
      if (app.got_subcommand(name)) {
        if (std::string(name) == "pipeline") {
          entry.second(options);
        } else {
          run_stage(name, [&] { entry.second(options); });
        }
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "qfreq: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const StageFailure& e) {
    std::cerr << "qfreq: stage " << e.stage() << " failed: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "qfreq: " << e.what() << '\n';
    return kExitAbort;
  }
  return kExitOk;
}

}  // namespace qfreq::cli
