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
 * chip.hpp - grid topology of a frequency-tunable chip, the gate index space,
 * coupler activation patterns, optimization windows and the matchings counter.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace qfreq {

using QubitIndex = std::size_t;
using GateIndex = std::size_t;
using QubitPair = std::pair<QubitIndex, QubitIndex>;
using BigCount = boost::multiprecision::cpp_int;

struct Site {
  int row = 0;
  int col = 0;
  bool operator==(const Site&) const = default;
};

/// A grid edge. `a` is the upper/left endpoint, so a < b always.
struct Coupler {
  QubitIndex a = 0;
  QubitIndex b = 0;
  bool horizontal = true;
};

/// Qubits of one gate: one entry for single-qubit gates, two for couplers.
struct GateQubits {
  std::array<QubitIndex, 2> q{};
  std::size_t count = 0;

  std::span<const QubitIndex> span() const { return {q.data(), count}; }
};

/*
 * M x N grid of tunable qubits with nearest-neighbor couplers.
 *
 * Gate index space: [0, MN) are single-qubit gates in row-major qubit order,
 * [MN, 3MN - M - N) are two-qubit gates, one per coupler. Couplers are ordered
 * horizontal first (row-major by left endpoint), then vertical (row-major by
 * top endpoint).
 */
class ChipTopology {
 public:
  static constexpr const char* kCouplerOrder = "h-then-v-row-major";

  ChipTopology() = default;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t num_qubits() const { return static_cast<std::size_t>(rows_) * cols_; }
  std::size_t num_couplers() const { return couplers_.size(); }
  std::size_t num_gates() const { return num_qubits() + num_couplers(); }

  QubitIndex qubit_at(int row, int col) const;
  Site site(QubitIndex q) const;
  bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < rows_ && col < cols_; }

  const std::vector<Coupler>& couplers() const { return couplers_; }
  std::optional<std::size_t> coupler_between(QubitIndex a, QubitIndex b) const;

  const std::vector<QubitPair>& neighbor_pairs() const { return neighbor_pairs_; }
  const std::vector<QubitPair>& next_neighbor_pairs() const { return next_neighbor_pairs_; }
  const std::vector<QubitPair>& crosstalk_pairs() const { return crosstalk_pairs_; }

  std::span<const QubitIndex> neighbors(QubitIndex q) const { return neighbors_[q]; }
  std::span<const QubitIndex> next_neighbors(QubitIndex q) const { return next_neighbors_[q]; }

  bool is_single_qubit_gate(GateIndex g) const { return g < num_qubits(); }
  GateIndex single_qubit_gate(QubitIndex q) const { return q; }
  GateIndex two_qubit_gate(std::size_t coupler) const { return num_qubits() + coupler; }
  std::size_t coupler_of_gate(GateIndex g) const;
  GateQubits gate_qubits(GateIndex g) const;

  /// Copy of this topology whose crosstalk pair list also contains `extra`.
  ChipTopology with_crosstalk_pairs(std::span<const QubitPair> extra) const;

  bool operator==(const ChipTopology& other) const;

 private:
  friend ChipTopology build_grid(int rows, int cols);

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Coupler> couplers_;
  std::vector<QubitPair> neighbor_pairs_;
  std::vector<QubitPair> next_neighbor_pairs_;
  std::vector<QubitPair> crosstalk_pairs_;
  std::vector<std::vector<QubitIndex>> neighbors_;
  std::vector<std::vector<QubitIndex>> next_neighbors_;
};

/// Builds the rows x cols grid. Crosstalk pairs default to neighbor and
/// next-neighbor pairs. Throws std::invalid_argument on non-positive sizes.
ChipTopology build_grid(int rows, int cols);

// ---------------------------------------------------------------------------
// Coupler activation patterns

enum class GroupFamily { ABCD, EFGH };

std::string to_string(GroupFamily family);
GroupFamily group_family_from_string(const std::string& name);

/*
 * Partition of the couplers into four matchings.
 *
 * ABCD is the staggered (checkerboard) pattern: a horizontal coupler with left
 * endpoint (r, c) is A when r + c is even and B otherwise; a vertical coupler
 * with top endpoint (r, c) is C when r + c is even and D otherwise.
 * EFGH is the columnar pattern: horizontal couplers are E/F by column parity,
 * vertical couplers are G/H by row parity.
 */
struct GroupPattern {
  GroupFamily family = GroupFamily::ABCD;
  std::vector<int> group_of_coupler;  // values in [0, 4)

  char label(int group) const;
  std::vector<std::size_t> members(int group) const;
};

GroupPattern assign_groups(const ChipTopology& topology, GroupFamily family);

// ---------------------------------------------------------------------------
// Parallel two-qubit gate scenarios (matchings of the coupler graph)

/// Number of matchings (including the empty one) of the grid graph, by a
/// column transfer-matrix recursion over boundary masks of the shorter side.
/// Throws std::length_error if 2^(min(rows, cols)) exceeds `max_boundary_states`.
BigCount count_parallel_scenarios(const ChipTopology& topology,
                                  std::uint64_t max_boundary_states = std::uint64_t{1} << 16);

// ---------------------------------------------------------------------------
// Optimization windows

/// Chebyshev block of qubits around `center`, clipped at the chip edge. A
/// coupler belongs to the window iff both endpoints are inside the block.
struct Window {
  QubitIndex center = 0;
  int radius = 0;
  std::vector<GateIndex> gates;  // sorted ascending
};

Window make_window(const ChipTopology& topology, QubitIndex center, int radius);

/// One window per qubit, in qubit order.
std::vector<Window> enumerate_windows(const ChipTopology& topology, int radius);

// ---------------------------------------------------------------------------
// Serialization: {rows, cols, coupler_order, crosstalk_pairs}

nlohmann::json chip_to_json(const ChipTopology& topology);
ChipTopology chip_from_json(const nlohmann::json& doc);

}  // namespace qfreq
