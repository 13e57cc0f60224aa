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

#pragma once

#include <cstdint>
#include <vector>

#include "xbarc/duplication.hpp"
#include "xbarc/network.hpp"
#include "xbarc/packing.hpp"
#include "xbarc/partition.hpp"

namespace xbarc {

struct CompileOptions {
  /// Duplicate layers into the spare area of a bounded budget.
  bool duplicate = false;
};

struct CompileResult {
  /// Single-copy partition of the network.
  std::vector<LayerBox> boxes;
  PackingPlan plan;
  /// Boxes that did not fit the budget (empty on success).
  std::vector<LayerBox> unplaced;
  /// Bottleneck copy count proposed by the area-only solver, before packing
  /// was taken into account.
  std::int64_t solver_bottleneck_copies = 1;

  bool feasible() const noexcept { return unplaced.empty(); }
  std::int64_t unplaced_area() const;
};

/// Partition -> (duplication) -> packing.
///
/// With duplication, the solver works on raw box areas. Its bottleneck copy
/// count is first capped by the crossbars that same-layer and adjacent-layer
/// boxes need on their own. When the duplicated boxes then fail to pack into
/// the budget, the count is lowered (binary search, keeping the largest count
/// that packs) down to the single-copy plan. Never throws for budget
/// problems; see feasible().
CompileResult try_compile(const Network& net, const HWConfig& hw, const CompileOptions& opts = {});

/// As try_compile but throws PackingInfeasible when the network does not fit.
CompileResult compile_network(const Network& net, const HWConfig& hw, const CompileOptions& opts = {});

}  // namespace xbarc
