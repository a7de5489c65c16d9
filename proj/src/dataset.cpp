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

#include "qfreq/dataset.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qfreq/digest.hpp"
#include "qfreq/parallel.hpp"

namespace qfreq {

namespace {

constexpr const char* kMagic = "qfreq-dataset v1";
constexpr std::uint64_t kTrainStream = 0x747261696eull;
constexpr std::uint64_t kTestStream = 0x74657374ull;

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_sci6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t comma = line.find(',', pos);
    const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw std::runtime_error("malformed dataset row: '" + cell + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::size_t Dataset::gate_count() const {
  return configs.empty() ? 0 : configs.front().size();
}

FrequencyConfig sample_config(const ChipTopology& topology, const FrequencyGrid& grid, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x63666721u};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::vector<double> f(topology.num_gates());
  for (double& w : f) w = grid.value(pick(rng));
  return FrequencyConfig(topology.num_qubits(), std::move(f));
}

double quantize_label(double error) { return std::strtod(format_sci6(error).c_str(), nullptr); }

std::pair<Dataset, Dataset> generate_dataset(const GateErrorOracle& oracle, std::size_t n_train,
                                             std::size_t n_test, std::uint64_t seed, unsigned threads) {
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("dataset splits must be non-empty");
  const ChipTopology& topo = oracle.topology();
  const DatasetProvenance prov{oracle.physics().seed, oracle.grid(), topo.rows(), topo.cols()};

  Dataset train, test;
  train.split = Split::Train;
  test.split = Split::Test;
  train.provenance = test.provenance = prov;

  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < n_train; ++i) {
    train.configs.push_back(sample_config(topo, oracle.grid(), derive_seed(seed, kTrainStream, i)));
    const auto v = train.configs.back().values();
    seen.emplace(v.begin(), v.end());
  }
  std::uint64_t draw = 0;
  while (test.configs.size() < n_test) {
    FrequencyConfig c = sample_config(topo, oracle.grid(), derive_seed(seed, kTestStream, draw++));
    const auto v = c.values();
    if (seen.count(std::vector<double>(v.begin(), v.end()))) continue;
    test.configs.push_back(std::move(c));
  }

  for (Dataset* d : {&train, &test}) {
    d->labels.resize(d->configs.size());
    parallel_for(d->configs.size(), threads, [&](std::size_t i) {
      GateErrorVector e = oracle.evaluate(d->configs[i]);
      for (double& x : e) x = quantize_label(x);
      d->labels[i] = std::move(e);
    });
  }
  return {std::move(train), std::move(test)};
}

std::vector<double> normalize(const FrequencyConfig& config, const FrequencyGrid& grid) {
  std::vector<double> x(config.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    grid.index_of(config[i]);
    x[i] = grid.normalize(config[i]);
  }
  return x;
}

// ---------------------------------------------------------------------------

void write_dataset(std::ostream& out, const Dataset& data) {
  const auto& p = data.provenance;
  out << kMagic << ", " << p.rows << ", " << p.cols << ", " << data.gate_count() << ", grid{"
      << format_fixed6(p.grid.f_min()) << ',' << format_fixed6(p.grid.f_max()) << ','
      << format_fixed6(p.grid.delta_f()) << "}, split=" << (data.split == Split::Train ? "train" : "test")
      << ", physics_seed=" << p.physics_seed << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto f = data.configs[i].values();
    for (std::size_t k = 0; k < f.size(); ++k) out << (k ? "," : "") << format_fixed6(f[k]);
    out << '\n';
    const auto& e = data.labels[i];
    for (std::size_t k = 0; k < e.size(); ++k) out << (k ? "," : "") << format_sci6(e[k]);
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind(kMagic, 0) != 0) {
    throw std::runtime_error("not a qfreq-dataset v1 file");
  }
  // Split the header on commas outside the grid{...} braces.
  std::vector<std::string> fields;
  {
    std::string cur;
    int depth = 0;
    for (char ch : header) {
      if (ch == '{') ++depth;
      if (ch == '}') --depth;
      if (ch == ',' && depth == 0) {
        fields.push_back(trim(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(trim(cur));
  }
  if (fields.size() < 5) throw std::runtime_error("truncated dataset header");

  Dataset d;
  d.provenance.rows = std::stoi(fields[1]);
  d.provenance.cols = std::stoi(fields[2]);
  const std::size_t gates = std::stoul(fields[3]);
  const std::string& g = fields[4];
  if (g.rfind("grid{", 0) != 0 || g.back() != '}') throw std::runtime_error("malformed grid field");
  const auto band = parse_csv_row(g.substr(5, g.size() - 6));
  if (band.size() != 3) throw std::runtime_error("malformed grid field");
  d.provenance.grid = FrequencyGrid(band[0], band[1], band[2]);
  for (std::size_t i = 5; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string::npos) continue;
    const std::string key = fields[i].substr(0, eq);
    const std::string value = fields[i].substr(eq + 1);
    if (key == "split") d.split = value == "test" ? Split::Test : Split::Train;
    if (key == "physics_seed") d.provenance.physics_seed = std::stoull(value);
  }

  const std::size_t qubits = static_cast<std::size_t>(d.provenance.rows) * d.provenance.cols;
  std::string freq_line, err_line;
  while (std::getline(in, freq_line)) {
    if (trim(freq_line).empty()) continue;
    if (!std::getline(in, err_line)) throw std::runtime_error("dataset record without error row");
    auto f = parse_csv_row(freq_line);
    auto e = parse_csv_row(err_line);
    if (f.size() != gates || e.size() != gates) throw std::runtime_error("dataset row length mismatch");
    d.configs.emplace_back(qubits, std::move(f));
    d.labels.push_back(std::move(e));
  }
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset(out, data);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace qfreq
