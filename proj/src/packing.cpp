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

#include "xbarc/packing.hpp"

#include <algorithm>
#include <tuple>

#include "xbarc/error.hpp"

namespace xbarc {

using nlohmann::json;
using nlohmann::ordered_json;

bool EmptySpace::contains(const EmptySpace& o) const noexcept {
  return container == o.container && x <= o.x && y <= o.y && x + w >= o.x + o.w && y + h >= o.y + o.h;
}

bool Placement::overlaps(const Placement& o) const noexcept {
  if (container != o.container) return false;
  return x < o.x + o.box.width && o.x < x + box.width && y < o.y + o.box.height && o.y < y + box.height;
}

std::int64_t PackResult::unplaced_area() const {
  std::int64_t total = 0;
  for (const auto& b : unplaced) total += b.area();
  return total;
}

std::vector<EmptySpace> ems_difference(const EmptySpace& s, const Placement& p) {
  const int px0 = p.x, py0 = p.y;
  const int px1 = p.x + p.box.width, py1 = p.y + p.box.height;
  const int sx1 = s.x + s.w, sy1 = s.y + s.h;
  if (p.container != s.container || px0 >= sx1 || px1 <= s.x || py0 >= sy1 || py1 <= s.y) return {s};

  std::vector<EmptySpace> out;
  if (px0 > s.x) out.push_back({s.container, s.x, s.y, px0 - s.x, s.h});
  if (px1 < sx1) out.push_back({s.container, px1, s.y, sx1 - px1, s.h});
  if (py0 > s.y) out.push_back({s.container, s.x, s.y, s.w, py0 - s.y});
  if (py1 < sy1) out.push_back({s.container, s.x, py1, s.w, sy1 - py1});
  return out;
}

void remove_inscribed(std::vector<EmptySpace>& spaces) {
  std::sort(spaces.begin(), spaces.end());
  spaces.erase(std::unique(spaces.begin(), spaces.end()), spaces.end());
  std::vector<EmptySpace> kept;
  kept.reserve(spaces.size());
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    bool inscribed = false;
    for (std::size_t j = 0; j < spaces.size() && !inscribed; ++j)
      inscribed = i != j && spaces[j].contains(spaces[i]);
    if (!inscribed) kept.push_back(spaces[i]);
  }
  spaces = std::move(kept);
}

bool layer_collides(std::span<const int> layers, int layer_idx) {
  auto has = [&](int l) { return std::binary_search(layers.begin(), layers.end(), l); };
  return has(layer_idx) || has(layer_idx - 1) || has(layer_idx + 1);
}

std::vector<LayerBox> packing_order(std::span<const LayerBox> boxes) {
  std::vector<LayerBox> order(boxes.begin(), boxes.end());
  std::stable_sort(order.begin(), order.end(), [](const LayerBox& a, const LayerBox& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    return std::tie(a.layer_idx, a.copy_idx, a.part_row, a.part_col) <
           std::tie(b.layer_idx, b.copy_idx, b.part_row, b.part_col);
  });
  return order;
}

EmsPacker::EmsPacker(const HWConfig& hw) : hw_(hw) { hw_.validate(); }

std::optional<Placement> EmsPacker::place(const LayerBox& box) {
  if (box.height > hw_.xbar_rows || box.width > hw_.xbar_cols || box.height < 1 || box.width < 1)
    throw ConfigError("box of layer " + std::to_string(box.layer_idx) + " (" + std::to_string(box.height) + "x" +
                      std::to_string(box.width) + ") does not fit a " + std::to_string(hw_.xbar_rows) + "x" +
                      std::to_string(hw_.xbar_cols) + " crossbar");

  // (dftrc, container, x, y)
  std::optional<std::tuple<std::int64_t, int, int, int>> best;
  for (int c = 0; c < containers_used(); ++c) {
    const Container& cont = containers_[c];
    if (cont.max_w < box.width || cont.max_h < box.height) continue;
    if (layer_collides(cont.layers, box.layer_idx)) continue;
    for (const auto& s : cont.spaces) {
      if (!s.fits(box.width, box.height)) continue;
      const std::int64_t dx = hw_.xbar_cols - (s.x + box.width);
      const std::int64_t dy = hw_.xbar_rows - (s.y + box.height);
      const auto key = std::make_tuple(dx * dx + dy * dy, c, s.x, s.y);
      if (!best || key < *best) best = key;
    }
    // Later containers lose ties, so a zero distance cannot be beaten.
    if (best && std::get<0>(*best) == 0) break;
  }

  if (!best) {
    if (hw_.bounded() && containers_used() >= hw_.num_xbars) return std::nullopt;
    Container fresh;
    fresh.spaces.push_back({containers_used(), 0, 0, hw_.xbar_cols, hw_.xbar_rows});
    fresh.max_w = hw_.xbar_cols;
    fresh.max_h = hw_.xbar_rows;
    containers_.push_back(std::move(fresh));
    best = std::make_tuple(std::int64_t{0}, containers_used() - 1, 0, 0);
  }

  Placement p{box, std::get<1>(*best), std::get<2>(*best), std::get<3>(*best)};
  commit(p);
  return p;
}

void EmsPacker::commit(const Placement& p) {
  Container& cont = containers_[p.container];
  std::vector<EmptySpace> next;
  next.reserve(cont.spaces.size() + 4);
  for (const auto& s : cont.spaces) {
    auto pieces = ems_difference(s, p);
    next.insert(next.end(), pieces.begin(), pieces.end());
  }
  remove_inscribed(next);
  cont.spaces = std::move(next);
  cont.max_w = cont.max_h = 0;
  for (const auto& s : cont.spaces) {
    cont.max_w = std::max(cont.max_w, s.w);
    cont.max_h = std::max(cont.max_h, s.h);
  }
  cont.layers.insert(std::upper_bound(cont.layers.begin(), cont.layers.end(), p.box.layer_idx), p.box.layer_idx);
  placements_.push_back(p);
}

PackResult try_pack(std::span<const LayerBox> boxes, const HWConfig& hw) {
  EmsPacker packer(hw);
  PackResult result;
  for (const auto& box : packing_order(boxes))
    if (!packer.place(box)) result.unplaced.push_back(box);
  result.plan.placements = packer.placements();
  result.plan.containers_used = packer.containers_used();
  result.plan.hw = hw;
  return result;
}

PackingPlan pack(std::span<const LayerBox> boxes, const HWConfig& hw) {
  PackResult result = try_pack(boxes, hw);
  if (!result.ok()) {
    std::string msg = "packing infeasible: " + std::to_string(result.unplaced.size()) + " box(es) unplaced within " +
                      std::to_string(hw.num_xbars) + " crossbars:";
    const std::size_t shown = std::min<std::size_t>(result.unplaced.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& b = result.unplaced[i];
      msg += " [layer " + std::to_string(b.layer_idx) + " copy " + std::to_string(b.copy_idx) + " part " +
             std::to_string(b.part_row) + "," + std::to_string(b.part_col) + " " + std::to_string(b.height) + "x" +
             std::to_string(b.width) + "]";
    }
    if (shown < result.unplaced.size()) msg += " ...";
    throw PackingInfeasible(msg, result.unplaced.size(), result.unplaced_area());
  }
  return std::move(result.plan);
}

double utilization(const PackingPlan& plan) {
  if (plan.containers_used == 0 || plan.placements.empty()) return 0.0;
  std::int64_t used = 0;
  for (const auto& p : plan.placements) used += p.box.area();
  return static_cast<double>(used) / (static_cast<double>(plan.containers_used) * plan.hw.xbar_area());
}

std::vector<int> plan_copies(const PackingPlan& plan, std::size_t n_layers) {
  std::vector<int> copies(n_layers, 0);
  for (const auto& p : plan.placements) {
    if (p.box.layer_idx < 0 || static_cast<std::size_t>(p.box.layer_idx) >= n_layers)
      throw ConfigError("plan references layer " + std::to_string(p.box.layer_idx) + " outside the network");
    copies[p.box.layer_idx] = std::max(copies[p.box.layer_idx], p.box.copy_idx + 1);
  }
  return copies;
}

ordered_json plan_to_json(const PackingPlan& plan) {
  ordered_json doc;
  doc["format"] = "xbarc-plan/1";
  doc["network_digest"] = plan.network_digest;
  doc["hw"] = hw_to_json(plan.hw);
  ordered_json dup;
  dup["copies"] = plan.duplication.copies;
  dup["bottleneck_layer"] = plan.duplication.bottleneck_layer;
  dup["throughput"] = plan.duplication.throughput;
  doc["duplication"] = std::move(dup);
  doc["containers_used"] = plan.containers_used;
  doc["utilization"] = utilization(plan);
  auto placements = ordered_json::array();
  for (const auto& p : plan.placements) {
    ordered_json r;
    r["layer"] = p.box.layer_idx;
    r["copy"] = p.box.copy_idx;
    r["part"] = {p.box.part_row, p.box.part_col};
    r["container"] = p.container;
    r["x"] = p.x;
    r["y"] = p.y;
    r["w"] = p.box.width;
    r["h"] = p.box.height;
    r["cycles"] = p.box.cycles;
    placements.push_back(std::move(r));
  }
  doc["placements"] = std::move(placements);
  return doc;
}

PackingPlan plan_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string{}) != "xbarc-plan/1") throw ParseError("plan: unsupported or missing format");
    PackingPlan plan;
    plan.network_digest = doc.value("network_digest", std::string{});
    plan.hw = hw_from_json(doc.at("hw"));
    const auto& dup = doc.at("duplication");
    plan.duplication.copies = dup.at("copies").get<std::vector<int>>();
    plan.duplication.bottleneck_layer = dup.at("bottleneck_layer").get<std::size_t>();
    plan.duplication.throughput = dup.at("throughput").get<double>();
    plan.containers_used = doc.at("containers_used").get<int>();
    for (const auto& r : doc.at("placements")) {
      Placement p;
      p.box.layer_idx = r.at("layer").get<int>();
      p.box.copy_idx = r.at("copy").get<int>();
      p.box.part_row = r.at("part").at(0).get<int>();
      p.box.part_col = r.at("part").at(1).get<int>();
      p.container = r.at("container").get<int>();
      p.x = r.at("x").get<int>();
      p.y = r.at("y").get<int>();
      p.box.width = r.at("w").get<int>();
      p.box.height = r.at("h").get<int>();
      p.box.cycles = r.at("cycles").get<std::int64_t>();
      if (p.container < 0 || p.container >= plan.containers_used)
        throw ParseError("plan: placement container out of range");
      plan.placements.push_back(p);
    }
    return plan;
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
}

}  // namespace xbarc
