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

#include "xbarc/network.hpp"

#include <cstdio>
#include <unordered_map>

#include "xbarc/error.hpp"

namespace xbarc {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv:
      return "conv";
    case LayerKind::DwConv:
      return "dwconv";
    case LayerKind::Fc:
      return "fc";
  }
  return "conv";
}

LayerKind layer_kind_from_string(std::string_view s) {
  if (s == "conv") return LayerKind::Conv;
  if (s == "dwconv") return LayerKind::DwConv;
  if (s == "fc") return LayerKind::Fc;
  throw ParseError("unknown layer kind '" + std::string(s) + "'");
}

Shape3 Layer::output_shape() const {
  Shape3 out{c_out, h_out, w_out};
  if (!pool) return out;
  if (pool->global) return {c_out, 1, 1};
  auto pooled = [&](int in) {
    const int span = in + 2 * pool->padding - pool->kernel;
    if (span < 0) return 0;
    int n = (pool->ceil_mode ? (span + pool->stride - 1) / pool->stride : span / pool->stride) + 1;
    // the last window must start inside the (left-padded) input
    if (pool->ceil_mode && (n - 1) * pool->stride >= in + pool->padding) --n;
    return n;
  };
  out.height = pooled(h_out);
  out.width = pooled(w_out);
  return out;
}

bool Network::shapes_inferred() const {
  for (const auto& l : layers)
    if (!l.shapes_inferred()) return false;
  return !layers.empty();
}

void HWConfig::validate() const {
  if (xbar_rows < 1) throw ParseError("xbar_rows: must be >= 1");
  if (xbar_cols < 1) throw ParseError("xbar_cols: must be >= 1");
  if (num_xbars < 0) throw ParseError("num_xbars: must be >= 0 (0 = unbounded)");
  if (s_dw < 1) throw ParseError("s_dw: must be >= 1");
}

namespace {

std::string field_path(std::size_t idx, std::string_view field) {
  return "layers[" + std::to_string(idx) + "]." + std::string(field);
}

int get_int(const json& obj, std::string_view key, const std::string& where) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x > INT32_MAX || x < INT32_MIN) throw ParseError(where + ": value out of range");
  return static_cast<int>(x);
}

std::optional<int> opt_int(const json& obj, std::string_view key, const std::string& where) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return get_int(obj, key, where);
}

void require_positive(int v, const std::string& where, std::string_view what) {
  if (v < 1) throw ParseError(where + ": " + std::string(what) + " must be >= 1");
}

PoolSpec parse_pool(const json& p, const std::string& where) {
  PoolSpec spec;
  if (p.is_string()) {
    if (p.get<std::string>() != "global") throw ParseError(where + ": unknown pool '" + p.get<std::string>() + "'");
    spec.global = true;
    return spec;
  }
  if (!p.is_object()) throw ParseError(where + ": expected an object or \"global\"");
  spec.global = p.value("global", false);
  if (spec.global) return spec;
  spec.kernel = opt_int(p, "k", where + ".k").value_or(2);
  spec.stride = opt_int(p, "stride", where + ".stride").value_or(spec.kernel);
  spec.padding = opt_int(p, "padding", where + ".padding").value_or(0);
  spec.ceil_mode = p.value("ceil_mode", false);
  require_positive(spec.kernel, where + ".k", "pool kernel");
  require_positive(spec.stride, where + ".stride", "pool stride");
  if (spec.padding < 0) throw ParseError(where + ".padding: padding must be >= 0");
  return spec;
}

Layer parse_layer(const json& l, std::size_t idx) {
  if (!l.is_object()) throw ParseError("layers[" + std::to_string(idx) + "]: expected an object");
  Layer layer;
  layer.name = l.contains("name") ? l.at("name").get<std::string>() : "layer" + std::to_string(idx);
  if (!l.contains("kind")) throw ParseError(field_path(idx, "kind") + ": missing");
  try {
    layer.kind = layer_kind_from_string(l.at("kind").get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(field_path(idx, "kind") + ": " + e.what());
  }

  auto c_in = opt_int(l, "c_in", field_path(idx, "c_in"));
  if (!c_in) c_in = opt_int(l, "in", field_path(idx, "in"));
  auto c_out = opt_int(l, "c_out", field_path(idx, "c_out"));
  if (!c_out) c_out = opt_int(l, "out", field_path(idx, "out"));
  if (!c_in) throw ParseError(field_path(idx, "c_in") + ": missing");
  require_positive(*c_in, field_path(idx, "c_in"), "c_in");
  layer.c_in = *c_in;

  if (layer.kind == LayerKind::DwConv) {
    layer.c_out = c_out.value_or(layer.c_in);
    if (layer.c_out != layer.c_in)
      throw ParseError(field_path(idx, "c_out") + ": dwconv requires c_out == c_in");
  } else {
    if (!c_out) throw ParseError(field_path(idx, "c_out") + ": missing");
    require_positive(*c_out, field_path(idx, "c_out"), "c_out");
    layer.c_out = *c_out;
  }

  const int k = opt_int(l, "k", field_path(idx, "k")).value_or(1);
  layer.k_h = opt_int(l, "k_h", field_path(idx, "k_h")).value_or(k);
  layer.k_w = opt_int(l, "k_w", field_path(idx, "k_w")).value_or(k);
  require_positive(layer.k_h, field_path(idx, "k_h"), "kernel height");
  require_positive(layer.k_w, field_path(idx, "k_w"), "kernel width");

  layer.stride = opt_int(l, "stride", field_path(idx, "stride")).value_or(1);
  require_positive(layer.stride, field_path(idx, "stride"), "stride");
  layer.padding = opt_int(l, "padding", field_path(idx, "padding")).value_or(0);
  if (layer.padding < 0) throw ParseError(field_path(idx, "padding") + ": padding must be >= 0");

  if (layer.kind == LayerKind::Fc && (layer.k_h != 1 || layer.k_w != 1))
    throw ParseError(field_path(idx, "k") + ": fc layers have a 1x1 kernel");

  if (l.contains("input")) {
    const auto& in = l.at("input");
    if (in.is_string()) {
      layer.inputs.push_back(in.get<std::string>());
    } else if (in.is_array() && !in.empty()) {
      for (const auto& name : in) {
        if (!name.is_string()) throw ParseError(field_path(idx, "input") + ": expected layer names");
        layer.inputs.push_back(name.get<std::string>());
      }
    } else {
      throw ParseError(field_path(idx, "input") + ": expected a name or a non-empty list of names");
    }
  }
  if (l.contains("pool")) layer.pool = parse_pool(l.at("pool"), field_path(idx, "pool"));
  return layer;
}

}  // namespace

Network network_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("network: expected an object");
  Network net;
  if (!doc.contains("input_shape")) throw ParseError("input_shape: missing");
  const auto& shape = doc.at("input_shape");
  if (!shape.is_array() || shape.size() != 3) throw ParseError("input_shape: expected [C, H, W]");
  for (const auto& v : shape)
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
      throw ParseError("input_shape: dimensions must be integers >= 1");
  net.input_shape = {shape[0].get<int>(), shape[1].get<int>(), shape[2].get<int>()};

  if (!doc.contains("layers") || !doc.at("layers").is_array() || doc.at("layers").empty())
    throw ParseError("layers: expected a non-empty list");
  std::unordered_map<std::string, std::size_t> seen;
  const auto& layers = doc.at("layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Layer layer = parse_layer(layers[i], i);
    if (layer.name == "input") throw ParseError(field_path(i, "name") + ": 'input' is reserved");
    if (!seen.emplace(layer.name, i).second)
      throw ParseError(field_path(i, "name") + ": duplicate layer name '" + layer.name + "'");
    for (const auto& src : layer.inputs)
      if (src != "input" && !seen.contains(src))
        throw ParseError(field_path(i, "input") + ": '" + src + "' is not an earlier layer");
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Network parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }
  try {
    return network_from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("network: ") + e.what());
  }
}

HWConfig hw_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("hw: expected an object");
  HWConfig hw;
  hw.xbar_rows = opt_int(doc, "xbar_rows", "xbar_rows").value_or(hw.xbar_rows);
  hw.xbar_cols = opt_int(doc, "xbar_cols", "xbar_cols").value_or(hw.xbar_cols);
  hw.num_xbars = opt_int(doc, "num_xbars", "num_xbars").value_or(hw.num_xbars);
  hw.s_dw = opt_int(doc, "s_dw", "s_dw").value_or(hw.s_dw);
  hw.validate();
  return hw;
}

HWConfig parse_hw(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed hardware document: ") + e.what());
  }
  return hw_from_json(doc);
}

ordered_json network_to_json(const Network& net) {
  ordered_json doc;
  doc["input_shape"] = {net.input_shape.channels, net.input_shape.height, net.input_shape.width};
  auto layers = ordered_json::array();
  for (const auto& l : net.layers) {
    ordered_json j;
    j["name"] = l.name;
    j["kind"] = to_string(l.kind);
    j["k_h"] = l.k_h;
    j["k_w"] = l.k_w;
    j["c_in"] = l.c_in;
    j["c_out"] = l.c_out;
    j["stride"] = l.stride;
    j["padding"] = l.padding;
    if (!l.inputs.empty()) j["input"] = l.inputs;
    if (l.pool) {
      if (l.pool->global) {
        j["pool"] = "global";
      } else {
        j["pool"] = {{"k", l.pool->kernel},
                     {"stride", l.pool->stride},
                     {"padding", l.pool->padding},
                     {"ceil_mode", l.pool->ceil_mode}};
      }
    }
    layers.push_back(std::move(j));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

ordered_json hw_to_json(const HWConfig& hw) {
  ordered_json doc;
  doc["xbar_rows"] = hw.xbar_rows;
  doc["xbar_cols"] = hw.xbar_cols;
  doc["num_xbars"] = hw.num_xbars;
  doc["s_dw"] = hw.s_dw;
  return doc;
}

Network infer_shapes(Network net, std::optional<Shape3> input_shape) {
  if (input_shape) net.input_shape = *input_shape;
  if (net.layers.empty()) throw ShapeError("network has no layers");
  std::unordered_map<std::string, std::size_t> index;

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    Layer& layer = net.layers[i];
    const std::string where = "layer '" + layer.name + "'";

    Shape3 in{};
    if (layer.inputs.empty()) {
      in = i == 0 ? net.input_shape : net.layers[i - 1].output_shape();
    } else {
      bool first = true;
      for (const auto& src : layer.inputs) {
        Shape3 s;
        if (src == "input") {
          s = net.input_shape;
        } else {
          auto it = index.find(src);
          if (it == index.end()) throw ShapeError(where + ": unknown input '" + src + "'");
          s = net.layers[it->second].output_shape();
        }
        if (first) {
          in = s;
          first = false;
        } else {
          if (s.height != in.height || s.width != in.width)
            throw ShapeError(where + ": concatenated inputs disagree on spatial size");
          in.channels += s.channels;
        }
      }
    }

    if (layer.kind == LayerKind::Fc) {
      const std::int64_t flat = static_cast<std::int64_t>(in.channels) * in.height * in.width;
      // an fc layer either flattens its input or sees it globally pooled
      if (layer.c_in != in.channels && layer.c_in != flat)
        throw ShapeError(where + ": c_in " + std::to_string(layer.c_in) + " does not match input (" +
                         std::to_string(in.channels) + " channels, " + std::to_string(flat) + " flattened)");
      layer.h_out = 1;
      layer.w_out = 1;
    } else {
      if (layer.c_in != in.channels)
        throw ShapeError(where + ": c_in " + std::to_string(layer.c_in) + " does not match producer channels " +
                         std::to_string(in.channels));
      const int span_h = in.height + 2 * layer.padding - layer.k_h;
      const int span_w = in.width + 2 * layer.padding - layer.k_w;
      if (span_h < 0 || span_w < 0)
        throw ShapeError(where + ": kernel larger than padded input, output dimension would be non-positive");
      layer.h_out = span_h / layer.stride + 1;
      layer.w_out = span_w / layer.stride + 1;
    }
    const Shape3 out = layer.output_shape();
    if (out.height < 1 || out.width < 1) throw ShapeError(where + ": pooled output dimension is non-positive");
    index.emplace(layer.name, i);
  }
  return net;
}

MatrixDims layer_matrix_dims(const Layer& layer) {
  const std::int64_t kk = static_cast<std::int64_t>(layer.k_h) * layer.k_w;
  if (layer.kind == LayerKind::DwConv) return {kk, layer.c_in};
  return {kk * layer.c_in, layer.c_out};
}

std::int64_t layer_cycles(const Layer& layer, int s_dw) {
  if (!layer.shapes_inferred()) throw ShapeError("layer '" + layer.name + "': shapes not inferred");
  const std::int64_t pixels = static_cast<std::int64_t>(layer.h_out) * layer.w_out;
  switch (layer.kind) {
    case LayerKind::Fc:
      return 1;
    case LayerKind::Conv:
      return pixels;
    case LayerKind::DwConv: {
      if (s_dw < 1) throw ConfigError("s_dw must be >= 1");
      if (s_dw > layer.c_in)
        throw ConfigError("layer '" + layer.name + "': s_dw " + std::to_string(s_dw) + " exceeds c_in " +
                          std::to_string(layer.c_in));
      const std::int64_t work = pixels * layer.c_in;
      return (work + s_dw - 1) / s_dw;
    }
  }
  return pixels;
}

std::int64_t parameter_count(const Network& net) {
  std::int64_t total = 0;
  for (const auto& l : net.layers) total += layer_matrix_dims(l).area();
  return total;
}

std::string digest_hex(std::string_view canonical) {
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string network_digest(const Network& net) { return digest_hex(network_to_json(net).dump()); }

std::string hw_digest(const HWConfig& hw) { return digest_hex(hw_to_json(hw).dump()); }

}  // namespace xbarc
