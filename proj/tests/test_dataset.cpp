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

#include <cmath>
#include <set>
#include <sstream>

#include "qfreq/dataset.hpp"

using namespace qfreq;

TEST_SUITE("dataset") {

TEST_CASE("grid size and values") {
  const FrequencyGrid g = default_grid();
  CHECK(g.size() == 401);
  CHECK(g.value(0) == 4.0);
  CHECK(g.value(400) == 4.8);
  CHECK(g.values().size() == 401);
  CHECK(FrequencyGrid(4.0, 4.001, 0.002).size() == 1);
  CHECK_THROWS_AS(FrequencyGrid(4.0, 4.0, 0.002), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(4.0, 4.8, 0.0), std::invalid_argument);
  CHECK(g.index_of(4.402) == 201);
  CHECK_FALSE(g.contains(4.4011));
  CHECK_FALSE(g.contains(4.802));
}

TEST_CASE("sample_config") {
  const ChipTopology t = build_grid(3, 3);
  const FrequencyGrid single(4.0, 4.001, 0.002);
  const FrequencyConfig flat = sample_config(t, single, 3);
  for (double w : flat.values()) CHECK(w == 4.0);
  const FrequencyGrid g = default_grid();
  const FrequencyConfig a = sample_config(t, g, 42);
  CHECK(a == sample_config(t, g, 42));
  CHECK_FALSE(a == sample_config(t, g, 43));
  CHECK(a.size() == t.num_gates());
  CHECK(a.num_qubits() == t.num_qubits());
  CHECK_NOTHROW(validate_config(t, g, a));
}

TEST_CASE("sampled frequencies are uniform over the grid") {
  const ChipTopology t = build_grid(2, 2);
  const FrequencyGrid g = default_grid();
  const std::size_t samples = 10000, bins = g.size();
  for (GateIndex gate : {GateIndex{0}, GateIndex{5}}) {
    std::vector<double> counts(bins, 0);
    for (std::size_t s = 0; s < samples; ++s) counts[g.index_of(sample_config(t, g, s)[gate])] += 1;
    const double expected = static_cast<double>(samples) / bins;
    double chi2 = 0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const double dof = static_cast<double>(bins - 1);
    CHECK(std::abs(chi2 - dof) <= 3 * std::sqrt(2 * dof));
  }
}

TEST_CASE("normalize") {
  const ChipTopology t = build_grid(1, 2);
  const FrequencyGrid g = default_grid();
  const FrequencyConfig c(2, {4.0, 4.8, 4.4});
  const std::vector<double> x = normalize(c, g);
  CHECK(x[0] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(x[2] == doctest::Approx(0.50).epsilon(1e-12));
  double last = 0;
  for (double w : g.values()) {
    const double v = g.normalize(w);
    CHECK(v > last);
    CHECK(v > 0);
    CHECK(v < 1);
    CHECK(g.denormalize(v) == doctest::Approx(w).epsilon(1e-12));
    last = v;
  }
  CHECK_THROWS_AS(normalize(FrequencyConfig(2, {4.0, 4.8, 4.4001}), g), std::invalid_argument);
  (void)t;
}

TEST_CASE("generate_dataset sizes, disjointness, determinism and labels") {
  const ChipTopology t = build_grid(3, 3);
  const FrequencyGrid g = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(t, 5, g), t, g);
  auto [train, test] = generate_dataset(oracle, 200, 50, 9);
  CHECK(train.configs.size() == 200);
  CHECK(test.configs.size() == 50);
  CHECK(train.labels.size() == 200);
  CHECK(train.split == Split::Train);
  CHECK(test.split == Split::Test);
  CHECK(train.provenance.physics_seed == 5);

  std::set<std::vector<double>> seen;
  for (const auto& c : train.configs) seen.insert({c.values().begin(), c.values().end()});
  for (const auto& c : test.configs) CHECK(seen.count({c.values().begin(), c.values().end()}) == 0);

  auto [train2, test2] = generate_dataset(oracle, 200, 50, 9, 3);
  CHECK(train == train2);
  CHECK(test == test2);

  for (std::size_t i = 0; i < train.configs.size(); ++i) {
    const GateErrorVector e = oracle.evaluate(train.configs[i]);
    REQUIRE(train.labels[i].size() == t.num_gates());
    for (std::size_t k = 0; k < e.size(); ++k) CHECK(train.labels[i][k] == quantize_label(e[k]));
  }

  auto [one, other] = generate_dataset(oracle, 1, 1, 1);
  CHECK_FALSE(one.configs[0] == other.configs[0]);
  CHECK_THROWS_AS(generate_dataset(oracle, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("dataset text round trip is bit exact") {
  const ChipTopology t = build_grid(2, 3);
  const FrequencyGrid g = default_grid();
  const GateErrorOracle oracle(sample_chip_physics(t, 2, g), t, g);
  auto [train, test] = generate_dataset(oracle, 30, 10, 4);
  for (const Dataset* d : {&train, &test}) {
    std::stringstream buf;
    write_dataset(buf, *d);
    const std::string text = buf.str();
    CHECK(text.rfind("qfreq-dataset v1, 2, 3, 13, grid{", 0) == 0);
    const Dataset back = read_dataset(buf);
    CHECK(back == *d);
    std::stringstream again;
    write_dataset(again, back);
    CHECK(again.str() == text);
  }
  std::stringstream bad("not-a-dataset\n");
  CHECK_THROWS(read_dataset(bad));
}

TEST_CASE("label quantization keeps six significant digits") {
  CHECK(quantize_label(1.234567891e-3) == 1.23457e-3);
  CHECK(quantize_label(quantize_label(0.0123456789)) == quantize_label(0.0123456789));
}

}  // TEST_SUITE
