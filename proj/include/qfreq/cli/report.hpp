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
 * report.hpp - strategy comparison against the oracle (means, improvements,
 * CDFs) and the VQE report records.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfreq/frequency.hpp"
#include "qfreq/physics.hpp"

namespace qfreq::cli {

/// Empirical CDF: sorted values and cumulative fractions k/n, ending at 1.
struct Cdf {
  std::vector<double> values;
  std::vector<double> cumulative;
};

Cdf make_cdf(std::vector<double> values);

struct StrategyErrors {
  std::string name;
  std::vector<double> single;  // oracle errors of single-qubit gates
  std::vector<double> two;
  double mean_single = 0;
  double mean_two = 0;
};

struct RunReport {
  StrategyErrors optimized;
  StrategyErrors greedy_snake;
  StrategyErrors random;
  nlohmann::json provenance;
};

/// 100 * (baseline - optimized) / baseline.
double improvement_pct(double baseline, double optimized);

/// Oracle errors of the three configurations, split by gate class. Configs
/// built for another topology are rejected.
RunReport make_run_report(const GateErrorOracle& oracle, const FrequencyConfig& optimized,
                          const FrequencyConfig& greedy_snake, const FrequencyConfig& random,
                          nlohmann::json provenance = nlohmann::json::object());

nlohmann::json report_to_json(const RunReport& report);
/// Long format: strategy,gate_class,error,cumulative.
void write_cdf_csv(std::ostream& out, const RunReport& report);
std::string comparison_table(const RunReport& report);

struct VqeRecord {
  int n = 0;
  double g = 0;
  int depth = 0;
  std::string pattern_family;
  std::string noise_source;  // optimized | random | zero
  double best_energy = 0;
  double exact_ground_energy = 0;
  int evaluations = 0;
};

nlohmann::json vqe_record_to_json(const VqeRecord& record);
VqeRecord vqe_record_from_json(const nlohmann::json& doc);

}  // namespace qfreq::cli
