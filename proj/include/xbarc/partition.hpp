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
#include <span>
#include <vector>

#include "xbarc/network.hpp"

namespace xbarc {

/// A crossbar-sized tile of a layer's flattened weight matrix.
struct LayerBox {
  int layer_idx = 0;
  int copy_idx = 0;
  int part_row = 0;
  int part_col = 0;
  int height = 0;
  int width = 0;
  /// Per-sample activation cycles of this tile.
  std::int64_t cycles = 0;

  std::int64_t area() const noexcept { return static_cast<std::int64_t>(height) * width; }
  bool operator==(const LayerBox&) const = default;
};

/// Splits one layer into crossbar-fitting boxes, rows first then columns.
/// Depthwise layers are first cut along the width into slices of
/// ceil(c_in / s_dw) channels; each slice carries h_out*w_out*channels cycles.
/// Throws ConfigError when a depthwise layer gets s_dw > c_in.
std::vector<LayerBox> partition_layer(const Layer& layer, int layer_idx, const HWConfig& hw);

/// Effective depthwise split for a layer: min(s_dw, c_in) for dwconv, 1 otherwise.
int effective_split(const Layer& layer, int s_dw);

/// partition_layer over the chain in order, copy_idx 0 throughout. The split
/// factor is clamped per depthwise layer with effective_split.
std::vector<LayerBox> partition_network(const Network& net, const HWConfig& hw);

/// Per-layer single-copy cycle count: the slowest box of each layer.
std::vector<std::int64_t> layer_cycle_counts(std::span<const LayerBox> boxes, std::size_t n_layers);
/// Per-layer single-copy area: sum of box areas of each layer.
std::vector<std::int64_t> layer_areas(std::span<const LayerBox> boxes, std::size_t n_layers);

}  // namespace xbarc
