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

#include "xbarc/compile.hpp"

#include "xbarc/error.hpp"

namespace xbarc {

std::int64_t CompileResult::unplaced_area() const {
  std::int64_t total = 0;
  for (const auto& b : unplaced) total += b.area();
  return total;
}

namespace {

struct Attempt {
  PackResult packed;
  DuplicationPlan duplication;
};

Attempt pack_with(const DuplicationProblem& problem, std::span<const LayerBox> boxes, const HWConfig& hw,
                  std::int64_t bottleneck_copies) {
  Attempt a;
  a.duplication.copies = copies_for_bottleneck(problem, bottleneck_copies);
  a.duplication.bottleneck_layer = problem.bottleneck();
  a.duplication.throughput =
      static_cast<double>(bottleneck_copies) / static_cast<double>(problem.cycles[problem.bottleneck()]);
  const auto copies = apply_duplication(boxes, a.duplication.copies);
  a.packed = try_pack(copies, hw);
  return a;
}

/// Largest bottleneck copy count (up to `top`) that passes a necessary
/// packing condition: boxes of one layer and of adjacent layers never share a
/// crossbar, so each adjacent pair needs that many distinct crossbars.
std::int64_t adjacency_cap(const DuplicationProblem& problem, std::span<const LayerBox> boxes, int num_xbars,
                           std::int64_t top) {
  std::vector<std::int64_t> per_layer(problem.size(), 0);
  for (const auto& b : boxes) ++per_layer[b.layer_idx];
  auto fits = [&](std::int64_t xt) {
    const auto copies = copies_for_bottleneck(problem, xt);
    for (std::size_t i = 0; i < copies.size(); ++i) {
      std::int64_t need = copies[i] * per_layer[i];
      if (i + 1 < copies.size()) need += copies[i + 1] * per_layer[i + 1];
      if (need > num_xbars) return false;
    }
    return true;
  };
  if (!fits(1)) return 1;
  std::int64_t lo = 1, hi = top;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

CompileResult try_compile(const Network& net, const HWConfig& hw, const CompileOptions& opts) {
  hw.validate();
  if (!net.shapes_inferred()) throw ShapeError("compile: network shapes not inferred");
  CompileResult result;
  result.boxes = partition_network(net, hw);
  const std::size_t n = net.size();

  Attempt chosen;
  if (!opts.duplicate) {
    chosen.packed = try_pack(result.boxes, hw);
    chosen.duplication = DuplicationPlan::identity(n);
  } else {
    if (!hw.bounded()) throw ConfigError("duplication needs a crossbar budget (num_xbars > 0)");
    const auto problem = make_duplication_problem(result.boxes, n, hw.cell_capacity());
    std::int64_t top = 1;
    try {
      top = solve_duplication(problem).bottleneck_copies();
    } catch (const DuplicationInfeasible&) {
      top = 1;
    }
    result.solver_bottleneck_copies = top;
    top = adjacency_cap(problem, result.boxes, hw.num_xbars, top);

    chosen = pack_with(problem, result.boxes, hw, top);
    if (!chosen.packed.ok() && top > 1) {
      Attempt floor = pack_with(problem, result.boxes, hw, 1);
      if (!floor.packed.ok()) {
        chosen = std::move(floor);
      } else {
        std::int64_t lo = 1, hi = top - 1;
        chosen = std::move(floor);
        while (lo < hi) {
          const std::int64_t mid = lo + (hi - lo + 1) / 2;
          Attempt a = pack_with(problem, result.boxes, hw, mid);
          if (a.packed.ok()) {
            lo = mid;
            chosen = std::move(a);
          } else {
            hi = mid - 1;
          }
        }
      }
    }
  }

  result.plan = std::move(chosen.packed.plan);
  result.plan.duplication = std::move(chosen.duplication);
  result.plan.network_digest = network_digest(net);
  result.unplaced = std::move(chosen.packed.unplaced);
  return result;
}

CompileResult compile_network(const Network& net, const HWConfig& hw, const CompileOptions& opts) {
  CompileResult r = try_compile(net, hw, opts);
  if (!r.feasible())
    throw PackingInfeasible("packing infeasible: " + std::to_string(r.unplaced.size()) +
                                " box(es) do not fit in " + std::to_string(hw.num_xbars) + " crossbars",
                            r.unplaced.size(), r.unplaced_area());
  return r;
}

}  // namespace xbarc
