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

#include "xbarc/partition.hpp"

#include <algorithm>

#include "xbarc/error.hpp"

namespace xbarc {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Grid split of an (height x width) matrix; part_col starts at col_offset so
// depthwise slices get distinct tile coordinates.
void split_grid(std::vector<LayerBox>& out, int layer_idx, std::int64_t height, std::int64_t width,
                std::int64_t cycles, int col_offset, const HWConfig& hw) {
  const auto rows = ceil_div(height, hw.xbar_rows);
  const auto cols = ceil_div(width, hw.xbar_cols);
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      LayerBox box;
      box.layer_idx = layer_idx;
      box.part_row = static_cast<int>(r);
      box.part_col = col_offset + static_cast<int>(c);
      box.height = static_cast<int>(std::min<std::int64_t>(hw.xbar_rows, height - r * hw.xbar_rows));
      box.width = static_cast<int>(std::min<std::int64_t>(hw.xbar_cols, width - c * hw.xbar_cols));
      box.cycles = cycles;
      out.push_back(box);
    }
  }
}

}  // namespace

int effective_split(const Layer& layer, int s_dw) {
  if (layer.kind != LayerKind::DwConv) return 1;
  return std::clamp(s_dw, 1, layer.c_in);
}

std::vector<LayerBox> partition_layer(const Layer& layer, int layer_idx, const HWConfig& hw) {
  hw.validate();
  if (!layer.shapes_inferred()) throw ShapeError("layer '" + layer.name + "': shapes not inferred");
  std::vector<LayerBox> boxes;
  const MatrixDims dims = layer_matrix_dims(layer);

  if (layer.kind != LayerKind::DwConv) {
    split_grid(boxes, layer_idx, dims.height, dims.width, layer_cycles(layer, 1), 0, hw);
    return boxes;
  }

  if (hw.s_dw > layer.c_in)
    throw ConfigError("layer '" + layer.name + "': s_dw " + std::to_string(hw.s_dw) + " exceeds c_in " +
                      std::to_string(layer.c_in));
  const std::int64_t pixels = static_cast<std::int64_t>(layer.h_out) * layer.w_out;
  const std::int64_t slice_width = ceil_div(layer.c_in, hw.s_dw);
  int col_offset = 0;
  for (std::int64_t first = 0; first < layer.c_in; first += slice_width) {
    const std::int64_t channels = std::min<std::int64_t>(slice_width, layer.c_in - first);
    split_grid(boxes, layer_idx, dims.height, channels, pixels * channels, col_offset, hw);
    col_offset += static_cast<int>(ceil_div(channels, hw.xbar_cols));
  }
  return boxes;
}

std::vector<LayerBox> partition_network(const Network& net, const HWConfig& hw) {
  std::vector<LayerBox> boxes;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    HWConfig layer_hw = hw;
    layer_hw.s_dw = effective_split(net.layers[i], hw.s_dw);
    auto part = partition_layer(net.layers[i], static_cast<int>(i), layer_hw);
    boxes.insert(boxes.end(), part.begin(), part.end());
  }
  return boxes;
}

std::vector<std::int64_t> layer_cycle_counts(std::span<const LayerBox> boxes, std::size_t n_layers) {
  std::vector<std::int64_t> cycles(n_layers, 0);
  for (const auto& b : boxes) {
    if (b.layer_idx < 0 || static_cast<std::size_t>(b.layer_idx) >= n_layers)
      throw ConfigError("box references layer " + std::to_string(b.layer_idx) + " outside the network");
    cycles[b.layer_idx] = std::max(cycles[b.layer_idx], b.cycles);
  }
  return cycles;
}

std::vector<std::int64_t> layer_areas(std::span<const LayerBox> boxes, std::size_t n_layers) {
  std::vector<std::int64_t> areas(n_layers, 0);
  for (const auto& b : boxes) {
    if (b.layer_idx < 0 || static_cast<std::size_t>(b.layer_idx) >= n_layers)
      throw ConfigError("box references layer " + std::to_string(b.layer_idx) + " outside the network");
    if (b.copy_idx == 0) areas[b.layer_idx] += b.area();
  }
  return areas;
}

}  // namespace xbarc
