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

#include "qfreq/cli/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "qfreq/optimizer.hpp"

namespace qfreq::cli {

Cdf make_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Cdf cdf;
  const std::size_t n = values.size();
  cdf.cumulative.resize(n);
  for (std::size_t k = 0; k < n; ++k) cdf.cumulative[k] = static_cast<double>(k + 1) / static_cast<double>(n);
  cdf.values = std::move(values);
  return cdf;
}

double improvement_pct(double baseline, double optimized) {
  if (!(baseline > 0)) throw std::invalid_argument("baseline mean must be positive");
  return 100.0 * (baseline - optimized) / baseline;
}

namespace {

StrategyErrors split_errors(const GateErrorOracle& oracle, const FrequencyConfig& config, const char* name) {
  const ChipTopology& topo = oracle.topology();
  if (config.num_qubits() != topo.num_qubits() || config.size() != topo.num_gates()) {
    throw std::invalid_argument(std::string(name) + " configuration belongs to another topology");
  }
  const GateErrorVector errors = oracle.evaluate(config);
  StrategyErrors s;
  s.name = name;
  for (GateIndex g = 0; g < errors.size(); ++g) {
    (topo.is_single_qubit_gate(g) ? s.single : s.two).push_back(errors[g]);
  }
  s.mean_single = mean(s.single);
  s.mean_two = mean(s.two);
  return s;
}

nlohmann::json cdf_json(const std::vector<double>& errors) {
  const Cdf cdf = make_cdf(errors);
  return {{"values", cdf.values}, {"cumulative", cdf.cumulative}};
}

}  // namespace

RunReport make_run_report(const GateErrorOracle& oracle, const FrequencyConfig& optimized,
                          const FrequencyConfig& greedy_snake, const FrequencyConfig& random,
                          nlohmann::json provenance) {
  RunReport r;
  r.optimized = split_errors(oracle, optimized, "optimized");
  r.greedy_snake = split_errors(oracle, greedy_snake, "greedy_snake");
  r.random = split_errors(oracle, random, "random");
  r.provenance = std::move(provenance);
  return r;
}

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json doc;
  nlohmann::json& means = doc["mean_error"];
  nlohmann::json& cdf = doc["cdf"];
  for (const StrategyErrors* s : {&r.optimized, &r.greedy_snake, &r.random}) {
    means[s->name] = {{"single_qubit", s->mean_single}, {"two_qubit", s->mean_two}};
    cdf[s->name] = {{"single_qubit", cdf_json(s->single)}, {"two_qubit", cdf_json(s->two)}};
  }
  for (const StrategyErrors* b : {&r.greedy_snake, &r.random}) {
    doc["improvement_pct"]["vs_" + b->name] = {
        {"single_qubit", improvement_pct(b->mean_single, r.optimized.mean_single)},
        {"two_qubit", improvement_pct(b->mean_two, r.optimized.mean_two)}};
  }
  doc["provenance"] = r.provenance;
  return doc;
}

void write_cdf_csv(std::ostream& out, const RunReport& r) {
  out << "strategy,gate_class,error,cumulative\n";
  char buf[64];
  for (const StrategyErrors* s : {&r.optimized, &r.greedy_snake, &r.random}) {
    for (const auto& [cls, errors] : {std::pair{"single_qubit", &s->single}, std::pair{"two_qubit", &s->two}}) {
      const Cdf cdf = make_cdf(*errors);
      for (std::size_t k = 0; k < cdf.values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6e,%.6f", cdf.values[k], cdf.cumulative[k]);
        out << s->name << ',' << cls << ',' << buf << '\n';
      }
    }
  }
}

std::string comparison_table(const RunReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %14s %14s\n", "strategy", "1q mean", "2q mean");
  out += line;
  for (const StrategyErrors* s : {&r.optimized, &r.greedy_snake, &r.random}) {
    std::snprintf(line, sizeof line, "%-14s %14.4e %14.4e\n", s->name.c_str(), s->mean_single, s->mean_two);
    out += line;
  }
  for (const StrategyErrors* b : {&r.greedy_snake, &r.random}) {
    std::snprintf(line, sizeof line, "improvement vs %-12s 1q %+7.2f%%  2q %+7.2f%%\n", b->name.c_str(),
                  improvement_pct(b->mean_single, r.optimized.mean_single),
                  improvement_pct(b->mean_two, r.optimized.mean_two));
    out += line;
  }
  return out;
}

nlohmann::json vqe_record_to_json(const VqeRecord& v) {
  return {{"n", v.n},
          {"g", v.g},
          {"depth", v.depth},
          {"pattern_family", v.pattern_family},
          {"noise_source", v.noise_source},
          {"best_energy", v.best_energy},
          {"exact_ground_energy", v.exact_ground_energy},
          {"evaluations", v.evaluations}};
}

VqeRecord vqe_record_from_json(const nlohmann::json& doc) {
  VqeRecord v;
  v.n = doc.at("n").get<int>();
  v.g = doc.at("g").get<double>();
  v.depth = doc.at("depth").get<int>();
  v.pattern_family = doc.at("pattern_family").get<std::string>();
  v.noise_source = doc.at("noise_source").get<std::string>();
  v.best_energy = doc.at("best_energy").get<double>();
  v.exact_ground_energy = doc.at("exact_ground_energy").get<double>();
  v.evaluations = doc.at("evaluations").get<int>();
  return v;
}

}  // namespace qfreq::cli
