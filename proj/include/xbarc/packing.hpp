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
 * @file packing.hpp
 * @brief Bin packing of layer boxes into crossbars with empty maximal spaces.
 *
 * Coordinates: x runs along crossbar columns (box width), y along crossbar
 * rows (box height); (x, y) is the lower-left corner. A box is always placed
 * at the lower-left corner of the chosen space and never rotated.
 *
 * Selection rule for each box: among all spaces of already opened crossbars
 * that fit the box and whose crossbar hosts no box of the same or an adjacent
 * layer, pick the one minimizing the squared distance between the box's
 * top-right corner and the crossbar's top-right corner; ties go to
 * (container, x, y). With no candidate a new crossbar is opened.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xbarc/duplication.hpp"
#include "xbarc/network.hpp"
#include "xbarc/partition.hpp"

namespace xbarc {

struct EmptySpace {
  int container = 0;
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t area() const noexcept { return static_cast<std::int64_t>(w) * h; }
  bool fits(int box_w, int box_h) const noexcept { return box_w <= w && box_h <= h; }
  /// True when `other` lies fully inside this space (same container).
  bool contains(const EmptySpace& other) const noexcept;
  auto operator<=>(const EmptySpace&) const = default;
};

struct Placement {
  LayerBox box;
  int container = 0;
  int x = 0;
  int y = 0;

  bool overlaps(const Placement& other) const noexcept;
  bool operator==(const Placement&) const = default;
};

struct PackingPlan {
  std::vector<Placement> placements;
  int containers_used = 0;
  HWConfig hw;
  DuplicationPlan duplication;
  /// Digest of the network the plan was compiled from (may be empty).
  std::string network_digest;

  bool operator==(const PackingPlan&) const = default;
};

struct PackResult {
  PackingPlan plan;
  std::vector<LayerBox> unplaced;

  bool ok() const noexcept { return unplaced.empty(); }
  std::int64_t unplaced_area() const;
};

/// Splits `space` around `placed`: up to four maximal rectangles (left, right,
/// below, above). Returns {space} when they do not intersect.
std::vector<EmptySpace> ems_difference(const EmptySpace& space, const Placement& placed);

/// Drops spaces inscribed in another space of the same container and exact
/// duplicates. Result is sorted.
void remove_inscribed(std::vector<EmptySpace>& spaces);

/// True when a container hosting `layers` may not receive a box of `layer_idx`
/// (same layer or a direct neighbour in the chain).
bool layer_collides(std::span<const int> layers, int layer_idx);

/// Largest area first, then (layer, copy, part_row, part_col).
std::vector<LayerBox> packing_order(std::span<const LayerBox> boxes);

/// Incremental EMS packer. Boxes are placed in the order given to place().
class EmsPacker {
 public:
  explicit EmsPacker(const HWConfig& hw);

  /// Places one box, opening a crossbar if needed. Returns nullopt when the
  /// budget is exhausted and no opened crossbar can take the box.
  std::optional<Placement> place(const LayerBox& box);

  int containers_used() const noexcept { return static_cast<int>(containers_.size()); }
  const std::vector<EmptySpace>& spaces(int container) const { return containers_.at(container).spaces; }
  const std::vector<int>& layers(int container) const { return containers_.at(container).layers; }
  const std::vector<Placement>& placements() const noexcept { return placements_; }
  const HWConfig& hw() const noexcept { return hw_; }

 private:
  struct Container {
    std::vector<EmptySpace> spaces;
    std::vector<int> layers;  // sorted
    int max_w = 0;            // widest and tallest space, for quick rejection
    int max_h = 0;
  };

  void commit(const Placement& p);

  HWConfig hw_;
  std::vector<Container> containers_;
  std::vector<Placement> placements_;
};

/// Packs boxes (sorted with packing_order first) and reports leftovers.
PackResult try_pack(std::span<const LayerBox> boxes, const HWConfig& hw);

/// As try_pack but throws PackingInfeasible when a box cannot be placed.
PackingPlan pack(std::span<const LayerBox> boxes, const HWConfig& hw);

/// Placed cells over the cells of crossbars that hold at least one box.
double utilization(const PackingPlan& plan);

/// Copy count per layer recovered from a plan (0 for layers it does not cover).
std::vector<int> plan_copies(const PackingPlan& plan, std::size_t n_layers);

nlohmann::ordered_json plan_to_json(const PackingPlan& plan);
PackingPlan plan_from_json(const nlohmann::json& doc);

}  // namespace xbarc
