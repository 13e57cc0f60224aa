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

#include "xbarc/duplication.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "xbarc/error.hpp"

namespace xbarc {

std::size_t DuplicationProblem::bottleneck() const {
  std::size_t t = 0;
  for (std::size_t i = 1; i < cycles.size(); ++i)
    if (cycles[i] > cycles[t]) t = i;
  return t;
}

void DuplicationProblem::validate() const {
  if (cycles.empty()) throw ConfigError("duplication problem has no layers");
  if (cycles.size() != areas.size()) throw ConfigError("duplication problem: cycles/areas length mismatch");
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (cycles[i] < 1) throw ConfigError("duplication problem: layer " + std::to_string(i) + " has C_i < 1");
    if (areas[i] < 1) throw ConfigError("duplication problem: layer " + std::to_string(i) + " has A_i < 1");
  }
  if (capacity < 0) throw ConfigError("duplication problem: negative capacity");
}

DuplicationPlan DuplicationPlan::identity(std::size_t n_layers, std::size_t bottleneck, double throughput) {
  DuplicationPlan plan;
  plan.copies.assign(n_layers, 1);
  plan.bottleneck_layer = bottleneck;
  plan.throughput = throughput;
  return plan;
}

DuplicationProblem make_duplication_problem(std::span<const LayerBox> boxes, std::size_t n_layers,
                                            std::int64_t capacity) {
  DuplicationProblem p;
  p.cycles = layer_cycle_counts(boxes, n_layers);
  p.areas = layer_areas(boxes, n_layers);
  p.capacity = capacity;
  return p;
}

std::vector<int> copies_for_bottleneck(const DuplicationProblem& p, std::int64_t bottleneck_copies) {
  const std::int64_t ct = p.cycles[p.bottleneck()];
  std::vector<int> copies(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    // smallest x_i with x_i * C_t >= x_t * C_i
    const std::int64_t need = bottleneck_copies * p.cycles[i];
    copies[i] = static_cast<int>((need + ct - 1) / ct);
  }
  return copies;
}

std::int64_t duplicated_area(const DuplicationProblem& p, std::span<const int> copies) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) total += copies[i] * p.areas[i];
  return total;
}

DuplicationPlan solve_duplication(const DuplicationProblem& p) {
  return solve_duplication(p, std::numeric_limits<int>::max());
}

DuplicationPlan solve_duplication(const DuplicationProblem& p, std::int64_t max_bottleneck_copies) {
  p.validate();
  const std::int64_t single = std::accumulate(p.areas.begin(), p.areas.end(), std::int64_t{0});
  if (single > p.capacity) throw DuplicationInfeasible(single - p.capacity);

  const std::size_t t = p.bottleneck();
  auto fits = [&](std::int64_t xt) {
    const auto copies = copies_for_bottleneck(p, xt);
    return duplicated_area(p, copies) <= p.capacity;
  };

  // x_t copies of layer t alone already cost x_t * A_t.
  std::int64_t lo = 1;
  std::int64_t hi = std::min(p.capacity / p.areas[t], max_bottleneck_copies);
  hi = std::max(hi, lo);
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }

  DuplicationPlan plan;
  plan.copies = copies_for_bottleneck(p, lo);
  plan.bottleneck_layer = t;
  plan.throughput = static_cast<double>(lo) / static_cast<double>(p.cycles[t]);
  return plan;
}

double lp_relaxation_bound(const DuplicationProblem& p) {
  p.validate();
  const double ct = static_cast<double>(p.cycles[p.bottleneck()]);
  double weighted = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    weighted += static_cast<double>(p.cycles[i]) / ct * static_cast<double>(p.areas[i]);
  return static_cast<double>(p.capacity) / weighted;
}

std::vector<LayerBox> apply_duplication(std::span<const LayerBox> boxes, std::span<const int> copies) {
  std::vector<LayerBox> out;
  for (const auto& b : boxes) {
    if (b.layer_idx < 0 || static_cast<std::size_t>(b.layer_idx) >= copies.size())
      throw ConfigError("box references layer " + std::to_string(b.layer_idx) + " outside the duplication plan");
    for (int c = 0; c < copies[b.layer_idx]; ++c) {
      LayerBox copy = b;
      copy.copy_idx = c;
      out.push_back(copy);
    }
  }
  return out;
}

}  // namespace xbarc
