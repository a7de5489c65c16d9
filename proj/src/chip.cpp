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

#include "qfreq/chip.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace qfreq {

QubitIndex ChipTopology::qubit_at(int row, int col) const {
  if (!contains(row, col)) {
    throw std::out_of_range("site (" + std::to_string(row) + ", " + std::to_string(col) +
                            ") is outside the chip");
  }
  return static_cast<QubitIndex>(row) * cols_ + col;
}

Site ChipTopology::site(QubitIndex q) const {
  if (q >= num_qubits()) throw std::out_of_range("qubit index out of range");
  return {static_cast<int>(q / cols_), static_cast<int>(q % cols_)};
}

std::optional<std::size_t> ChipTopology::coupler_between(QubitIndex a, QubitIndex b) const {
  if (a > b) std::swap(a, b);
  for (std::size_t c = 0; c < couplers_.size(); ++c) {
    if (couplers_[c].a == a && couplers_[c].b == b) return c;
  }
  return std::nullopt;
}

std::size_t ChipTopology::coupler_of_gate(GateIndex g) const {
  if (g < num_qubits() || g >= num_gates()) {
    throw std::out_of_range("gate " + std::to_string(g) + " is not a two-qubit gate");
  }
  return g - num_qubits();
}

GateQubits ChipTopology::gate_qubits(GateIndex g) const {
  if (g >= num_gates()) throw std::out_of_range("gate index " + std::to_string(g) + " out of range");
  GateQubits out;
  if (is_single_qubit_gate(g)) {
    out.q[0] = g;
    out.count = 1;
  } else {
    const Coupler& c = couplers_[g - num_qubits()];
    out.q = {c.a, c.b};
    out.count = 2;
  }
  return out;
}

ChipTopology ChipTopology::with_crosstalk_pairs(std::span<const QubitPair> extra) const {
  std::set<QubitPair> pairs(crosstalk_pairs_.begin(), crosstalk_pairs_.end());
  for (auto [i, j] : extra) {
    if (i == j || i >= num_qubits() || j >= num_qubits()) {
      throw std::invalid_argument("invalid crosstalk pair");
    }
    pairs.insert({std::min(i, j), std::max(i, j)});
  }
  ChipTopology out = *this;
  out.crosstalk_pairs_.assign(pairs.begin(), pairs.end());
  return out;
}

bool ChipTopology::operator==(const ChipTopology& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && crosstalk_pairs_ == other.crosstalk_pairs_;
}

ChipTopology build_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("grid dimensions must be positive, got " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  }
  ChipTopology t;
  t.rows_ = rows;
  t.cols_ = cols;
  const std::size_t n = t.num_qubits();

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      t.couplers_.push_back({t.qubit_at(r, c), t.qubit_at(r, c + 1), true});
    }
  }
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      t.couplers_.push_back({t.qubit_at(r, c), t.qubit_at(r + 1, c), false});
    }
  }

  t.neighbors_.assign(n, {});
  t.next_neighbors_.assign(n, {});
  for (QubitIndex i = 0; i < n; ++i) {
    const Site si = t.site(i);
    for (QubitIndex j = i + 1; j < n; ++j) {
      const Site sj = t.site(j);
      const int manhattan = std::abs(si.row - sj.row) + std::abs(si.col - sj.col);
      if (manhattan == 1) {
        t.neighbor_pairs_.push_back({i, j});
        t.neighbors_[i].push_back(j);
        t.neighbors_[j].push_back(i);
      } else if (manhattan == 2) {
        t.next_neighbor_pairs_.push_back({i, j});
        t.next_neighbors_[i].push_back(j);
        t.next_neighbors_[j].push_back(i);
      }
    }
  }
  for (auto& v : t.neighbors_) std::sort(v.begin(), v.end());
  for (auto& v : t.next_neighbors_) std::sort(v.begin(), v.end());

  t.crosstalk_pairs_ = t.neighbor_pairs_;
  t.crosstalk_pairs_.insert(t.crosstalk_pairs_.end(), t.next_neighbor_pairs_.begin(),
                            t.next_neighbor_pairs_.end());
  std::sort(t.crosstalk_pairs_.begin(), t.crosstalk_pairs_.end());
  return t;
}

// ---------------------------------------------------------------------------

std::string to_string(GroupFamily family) {
  return family == GroupFamily::ABCD ? "ABCD" : "EFGH";
}

GroupFamily group_family_from_string(const std::string& name) {
  if (name == "ABCD") return GroupFamily::ABCD;
  if (name == "EFGH") return GroupFamily::EFGH;
  throw std::invalid_argument("unknown group family '" + name + "'");
}

char GroupPattern::label(int group) const {
  if (group < 0 || group > 3) throw std::out_of_range("group must be in [0, 4)");
  return static_cast<char>((family == GroupFamily::ABCD ? 'A' : 'E') + group);
}

std::vector<std::size_t> GroupPattern::members(int group) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < group_of_coupler.size(); ++c) {
    if (group_of_coupler[c] == group) out.push_back(c);
  }
  return out;
}

GroupPattern assign_groups(const ChipTopology& topology, GroupFamily family) {
  GroupPattern p;
  p.family = family;
  p.group_of_coupler.reserve(topology.num_couplers());
  for (const Coupler& c : topology.couplers()) {
    const Site s = topology.site(c.a);
    const int parity = family == GroupFamily::ABCD ? (s.row + s.col) % 2
                       : c.horizontal             ? s.col % 2
                                                  : s.row % 2;
    p.group_of_coupler.push_back((c.horizontal ? 0 : 2) + parity);
  }
  return p;
}

// ---------------------------------------------------------------------------

namespace {

// Matchings of a path whose vertices are the set bits of `free` (edges only
// between vertically adjacent set bits): product of Fibonacci numbers over the
// maximal runs of consecutive free vertices.
std::uint64_t path_matchings(std::uint32_t free_mask, int height) {
  std::uint64_t total = 1;
  int run = 0;
  auto close_run = [&] {
    std::uint64_t f0 = 1, f1 = 1;  // matchings of paths with 0 and 1 vertices
    for (int i = 1; i < run; ++i) {
      const std::uint64_t f2 = f1 + f0;
      f0 = f1;
      f1 = f2;
    }
    total *= run == 0 ? 1 : f1;
    run = 0;
  };
  for (int r = 0; r < height; ++r) {
    if (free_mask >> r & 1u) {
      ++run;
    } else {
      close_run();
    }
  }
  close_run();
  return total;
}

}  // namespace

BigCount count_parallel_scenarios(const ChipTopology& topology, std::uint64_t max_boundary_states) {
  // Walk along the longer side; the boundary is a column of `height` sites.
  const int height = std::min(topology.rows(), topology.cols());
  const int length = std::max(topology.rows(), topology.cols());
  if (height <= 0) throw std::invalid_argument("empty topology");
  if (height >= 32 || (std::uint64_t{1} << height) > max_boundary_states) {
    throw std::length_error("boundary state space 2^" + std::to_string(height) +
                            " exceeds the configured limit of " +
                            std::to_string(max_boundary_states));
  }
  const std::uint32_t states = 1u << height;
  const std::uint32_t full = states - 1;

  // ways[m]: matchings of the processed columns where mask m marks the sites
  // of the next column already matched by a horizontal edge from the left.
  std::vector<BigCount> ways(states, 0);
  ways[0] = 1;
  for (int col = 0; col < length; ++col) {
    const bool last = col + 1 == length;
    std::vector<BigCount> next(states, 0);
    for (std::uint32_t in = 0; in < states; ++in) {
      if (ways[in] == 0) continue;
      const std::uint32_t avail = full & ~in;
      // Enumerate every subset `out` of the available sites that match rightwards.
      std::uint32_t out = avail;
      while (true) {
        if (!last || out == 0) {
          next[out] += ways[in] * path_matchings(avail & ~out, height);
        }
        if (out == 0) break;
        out = (out - 1) & avail;
      }
    }
    ways = std::move(next);
  }
  return ways[0];
}

// ---------------------------------------------------------------------------

Window make_window(const ChipTopology& topology, QubitIndex center, int radius) {
  if (radius < 0) throw std::invalid_argument("window radius must be non-negative");
  const Site c = topology.site(center);
  auto inside = [&](QubitIndex q) {
    const Site s = topology.site(q);
    return std::abs(s.row - c.row) <= radius && std::abs(s.col - c.col) <= radius;
  };
  Window w;
  w.center = center;
  w.radius = radius;
  for (QubitIndex q = 0; q < topology.num_qubits(); ++q) {
    if (inside(q)) w.gates.push_back(topology.single_qubit_gate(q));
  }
  for (std::size_t k = 0; k < topology.num_couplers(); ++k) {
    const Coupler& cp = topology.couplers()[k];
    if (inside(cp.a) && inside(cp.b)) w.gates.push_back(topology.two_qubit_gate(k));
  }
  return w;
}

std::vector<Window> enumerate_windows(const ChipTopology& topology, int radius) {
  if (radius < 0) throw std::invalid_argument("window radius must be non-negative");
  std::vector<Window> out;
  out.reserve(topology.num_qubits());
  for (QubitIndex q = 0; q < topology.num_qubits(); ++q) out.push_back(make_window(topology, q, radius));
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json chip_to_json(const ChipTopology& topology) {
  nlohmann::json pairs = nlohmann::json::array();
  for (auto [i, j] : topology.crosstalk_pairs()) pairs.push_back({i, j});
  return {{"rows", topology.rows()},
          {"cols", topology.cols()},
          {"coupler_order", ChipTopology::kCouplerOrder},
          {"crosstalk_pairs", std::move(pairs)}};
}

ChipTopology chip_from_json(const nlohmann::json& doc) {
  const std::string order = doc.at("coupler_order").get<std::string>();
  if (order != ChipTopology::kCouplerOrder) {
    throw std::invalid_argument("unsupported coupler_order '" + order + "'");
  }
  ChipTopology t = build_grid(doc.at("rows").get<int>(), doc.at("cols").get<int>());
  std::vector<QubitPair> pairs;
  for (const auto& p : doc.at("crosstalk_pairs")) {
    pairs.emplace_back(p.at(0).get<QubitIndex>(), p.at(1).get<QubitIndex>());
  }
  return t.with_crosstalk_pairs(pairs);
}

}  // namespace qfreq
