/*
 * Copyright 2026 The xbarc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file duplication.hpp
 * @brief Layer duplication under a crossbar-area budget.
 *
 * Layer t is the slowest layer (largest cycle count, earliest on ties). The
 * solver maximizes its copy count x_t subject to every other layer being at
 * least as fast, x_i * C_t >= x_t * C_i, and the total duplicated area
 * fitting the capacity. For a fixed x_t the cheapest vector is
 * x_i = ceil(x_t * C_i / C_t), and its area is monotone in x_t, so the
 * integer optimum is found by binary search over x_t.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xbarc/partition.hpp"

namespace xbarc {

struct DuplicationProblem {
  /// C_i, cycles of one copy of layer i.
  std::vector<std::int64_t> cycles;
  /// A_i, cells of one copy of layer i.
  std::vector<std::int64_t> areas;
  /// Total cells available.
  std::int64_t capacity = 0;

  std::size_t size() const noexcept { return cycles.size(); }
  /// Index of the slowest layer, earliest on ties.
  std::size_t bottleneck() const;
  void validate() const;
};

struct DuplicationPlan {
  std::vector<int> copies;
  std::size_t bottleneck_layer = 0;
  /// x_t / C_t, samples per cycle of the bottleneck layer.
  double throughput = 0.0;

  int bottleneck_copies() const { return copies.empty() ? 0 : copies[bottleneck_layer]; }
  /// All-ones plan for n layers.
  static DuplicationPlan identity(std::size_t n_layers, std::size_t bottleneck = 0, double throughput = 0.0);
  bool operator==(const DuplicationPlan&) const = default;
};

DuplicationProblem make_duplication_problem(std::span<const LayerBox> boxes, std::size_t n_layers,
                                            std::int64_t capacity);

/// Copy vector x_i = ceil(x_t * C_i / C_t) for a given bottleneck copy count.
std::vector<int> copies_for_bottleneck(const DuplicationProblem& p, std::int64_t bottleneck_copies);
std::int64_t duplicated_area(const DuplicationProblem& p, std::span<const int> copies);

/// Exact integer optimum. Throws DuplicationInfeasible when sum A_i > capacity.
DuplicationPlan solve_duplication(const DuplicationProblem& p);

/// Same optimum restricted to x_t <= max_bottleneck_copies.
DuplicationPlan solve_duplication(const DuplicationProblem& p, std::int64_t max_bottleneck_copies);

/// Continuous optimum capacity / sum((C_i / C_t) * A_i); upper-bounds x_t.
double lp_relaxation_bound(const DuplicationProblem& p);

/// Expands boxes with copy_idx 1..x_i-1 per layer, preserving box order
/// within each copy.
std::vector<LayerBox> apply_duplication(std::span<const LayerBox> boxes, std::span<const int> copies);

}  // namespace xbarc
