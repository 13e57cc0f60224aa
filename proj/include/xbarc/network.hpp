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
 * @file network.hpp
 * @brief Network IR: layers, hardware description, shape inference and the
 *        per-layer weight-matrix / cycle model used by the compiler.
 *
 * A network is a linear chain of weight-bearing layers (conv, depthwise conv,
 * fully connected). Branching topologies are expressed by letting a layer
 * name its producers through `inputs`; compilation and simulation still walk
 * the declared chain order.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xbarc {

enum class LayerKind { Conv, DwConv, Fc };

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view s);

/// Pooling applied to a layer's output before its consumers see it.
/// Pooling owns no crossbar area and no cycles.
struct PoolSpec {
  int kernel = 2;
  int stride = 2;
  int padding = 0;
  bool ceil_mode = false;
  bool global = false;

  bool operator==(const PoolSpec&) const = default;
};

struct Shape3 {
  int channels = 0;
  int height = 0;
  int width = 0;

  bool operator==(const Shape3&) const = default;
};

struct Layer {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  int k_h = 1;
  int k_w = 1;
  int c_in = 1;
  int c_out = 1;
  int stride = 1;
  int padding = 0;
  /// Producer layer names. Empty means "the previous layer in the chain"
  /// (or the network input for the first layer). The reserved name "input"
  /// refers to the network input. Several names are channel-concatenated.
  std::vector<std::string> inputs;
  std::optional<PoolSpec> pool;

  // Filled by infer_shapes; 0 means not inferred yet.
  int h_out = 0;
  int w_out = 0;

  bool shapes_inferred() const noexcept { return h_out > 0 && w_out > 0; }
  /// Output shape as seen by consumers (after pooling).
  Shape3 output_shape() const;

  bool operator==(const Layer&) const = default;
};

struct Network {
  std::vector<Layer> layers;
  Shape3 input_shape;

  std::size_t size() const noexcept { return layers.size(); }
  bool shapes_inferred() const;

  bool operator==(const Network&) const = default;
};

struct HWConfig {
  int xbar_rows = 128;
  int xbar_cols = 128;
  /// Crossbar budget; 0 means unbounded.
  int num_xbars = 0;
  /// Depthwise split factor.
  int s_dw = 1;

  bool bounded() const noexcept { return num_xbars > 0; }
  std::int64_t xbar_area() const noexcept {
    return static_cast<std::int64_t>(xbar_rows) * xbar_cols;
  }
  /// Total cells across the budget (0 when unbounded).
  std::int64_t cell_capacity() const noexcept { return xbar_area() * num_xbars; }
  void validate() const;

  bool operator==(const HWConfig&) const = default;
};

struct MatrixDims {
  std::int64_t height = 0;
  std::int64_t width = 0;

  std::int64_t area() const noexcept { return height * width; }
  bool operator==(const MatrixDims&) const = default;
};

Network parse_network(std::string_view text);
HWConfig parse_hw(std::string_view text);

nlohmann::ordered_json network_to_json(const Network& net);
nlohmann::ordered_json hw_to_json(const HWConfig& hw);
Network network_from_json(const nlohmann::json& doc);
HWConfig hw_from_json(const nlohmann::json& doc);

/// Fills h_out / w_out of every layer and checks channel consistency.
/// Idempotent. Passing `input_shape` overrides the network's own.
Network infer_shapes(Network net, std::optional<Shape3> input_shape = std::nullopt);

/// Flattened weight matrix: conv/fc -> (k_w*k_h*c_in, c_out),
/// dwconv -> (k_w*k_h, c_in).
MatrixDims layer_matrix_dims(const Layer& layer);

/// Activation cycles per sample: fc 1, conv h_out*w_out,
/// dwconv ceil(h_out*w_out*c_in / s_dw).
std::int64_t layer_cycles(const Layer& layer, int s_dw = 1);

/// Weight cells of the whole network (one weight per cell, no bias).
std::int64_t parameter_count(const Network& net);

/// Stable hex digest of the semantic content of a document.
std::string digest_hex(std::string_view canonical);
std::string network_digest(const Network& net);
std::string hw_digest(const HWConfig& hw);

}  // namespace xbarc
