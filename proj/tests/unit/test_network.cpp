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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "xbarc/error.hpp"
#include "xbarc/network.hpp"

using namespace xbarc;
using namespace xbarc::test;

namespace {

std::string one_layer(const std::string& layer) {
  return R"({"input_shape": [3, 64, 64], "layers": [)" + layer + "]}";
}

// Hand-computed conv arithmetic, independent of infer_shapes.
int out_dim(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }

}  // namespace

TEST_CASE("single fc layer parses") {
  const Network net = parse_network(R"({"input_shape": [128, 1, 1], "layers": [{"kind": "fc", "in": 128, "out": 10}]})");
  REQUIRE(net.size() == 1);
  CHECK(net.layers[0].kind == LayerKind::Fc);
  CHECK(net.layers[0].c_in == 128);
  CHECK(net.layers[0].c_out == 10);
  CHECK_FALSE(net.layers[0].shapes_inferred());
}

TEST_CASE("squeezenet transcription has 26 weight layers and a 13x13 final conv") {
  const Network raw = parse_network(read_text(model_path("squeezenet_v1_0.json")));
  CHECK(raw.size() == 26);
  const Network net = infer_shapes(raw);
  const Layer& conv10 = net.layers.back();
  CHECK(conv10.name == "conv10");
  CHECK(conv10.h_out == 13);
  CHECK(conv10.w_out == 13);

  // Hand propagation: conv1 7x7/2, then 3x3/2 ceil-mode pools after conv1,
  // fire4 and fire8.
  int h = out_dim(224, 7, 2, 0);
  CHECK(net.layers[0].h_out == h);
  auto ceil_pool = [](int x) { return (x - 3 + 1) / 2 + 1; };
  h = ceil_pool(h);
  CHECK(h == 54);
  h = ceil_pool(h);
  CHECK(h == 27);
  h = ceil_pool(h);
  CHECK(h == 13);
}

TEST_CASE("parse errors name the offending field") {
  SUBCASE("stride 0") {
    try {
      parse_network(one_layer(R"({"kind": "conv", "k": 3, "c_in": 3, "c_out": 8, "stride": 0})"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("stride must be >= 1") != std::string::npos);
      CHECK(std::string(e.what()).find("layers[0].stride") != std::string::npos);
    }
  }
  SUBCASE("unknown kind") {
    CHECK_THROWS_AS(parse_network(one_layer(R"({"kind": "lstm", "c_in": 3, "c_out": 8})")), ParseError);
  }
  SUBCASE("non-positive channel count") {
    CHECK_THROWS_AS(parse_network(one_layer(R"({"kind": "conv", "k": 3, "c_in": 0, "c_out": 8})")), ParseError);
  }
  SUBCASE("malformed document") { CHECK_THROWS_AS(parse_network("{\"layers\": ["), ParseError); }
  SUBCASE("fc with a kernel") {
    CHECK_THROWS_AS(parse_network(one_layer(R"({"kind": "fc", "k": 3, "c_in": 3, "c_out": 8})")), ParseError);
  }
  SUBCASE("dwconv with c_out != c_in") {
    CHECK_THROWS_AS(parse_network(one_layer(R"({"kind": "dwconv", "k": 3, "c_in": 3, "c_out": 8})")), ParseError);
  }
  SUBCASE("forward reference") {
    CHECK_THROWS_AS(parse_network(R"({"input_shape": [3, 8, 8], "layers": [
      {"name": "a", "kind": "conv", "k": 1, "c_in": 3, "c_out": 3, "input": "b"},
      {"name": "b", "kind": "conv", "k": 1, "c_in": 3, "c_out": 3}]})"),
                    ParseError);
  }
}

TEST_CASE("shape inference follows the convolution formula") {
  Network net;
  net.input_shape = {3, 64, 64};
  net.layers = {conv("same", 3, 3, 8, 1, 1)};
  CHECK(infer_shapes(net).layers[0].h_out == 64);
  net.layers = {conv("half", 3, 3, 8, 2, 1)};
  const Network halved = infer_shapes(net);
  CHECK(halved.layers[0].h_out == 32);
  CHECK(halved.layers[0].w_out == 32);

  net.layers = {conv("huge", 9, 3, 8)};
  net.input_shape = {3, 4, 4};
  CHECK_THROWS_AS(infer_shapes(net), ShapeError);
}

TEST_CASE("fc gets a 1x1 output") {
  Network net;
  net.input_shape = {3, 8, 8};
  net.layers = {conv("c", 3, 3, 16, 1, 1), fc("f", 16, 10)};
  const Network out = infer_shapes(net);
  CHECK(out.layers[1].h_out == 1);
  CHECK(out.layers[1].w_out == 1);
}

TEST_CASE("layer matrix dims") {
  Network net;
  net.input_shape = {3, 32, 32};
  net.layers = {conv("c", 3, 3, 32, 1, 1)};
  const auto d = layer_matrix_dims(infer_shapes(net).layers[0]);
  CHECK(d == MatrixDims{27, 32});
  CHECK(d.area() == 864);

  net.layers = {dwconv("dw", 3, 3, 1, 1), conv("pw", 1, 3, 32)};
  const Network sep = infer_shapes(net);
  const auto dw = layer_matrix_dims(sep.layers[0]);
  const auto pw = layer_matrix_dims(sep.layers[1]);
  CHECK(dw == MatrixDims{9, 3});
  CHECK(pw == MatrixDims{3, 32});
  CHECK(dw.area() + pw.area() == 27 + 96);
  CHECK(dw.area() + sep.layers[1].c_out == 59);

  net.input_shape = {128, 1, 1};
  net.layers = {fc("f", 128, 10)};
  CHECK(layer_matrix_dims(infer_shapes(net).layers[0]) == MatrixDims{128, 10});
}

TEST_CASE("layer cycles") {
  Network net;
  net.input_shape = {40, 32, 32};
  net.layers = {conv("c", 3, 40, 8, 1, 1), dwconv("dw", 3, 8, 2, 1), fc("f", 8, 10)};
  const Network s = infer_shapes(net);
  CHECK(layer_cycles(s.layers[0]) == 1024);
  CHECK(layer_cycles(s.layers[2]) == 1);

  Network dw_net;
  dw_net.input_shape = {40, 16, 16};
  dw_net.layers = {dwconv("dw", 3, 40, 1, 1)};
  const Layer dw = infer_shapes(dw_net).layers[0];
  CHECK(layer_cycles(dw, 10) == 1024);
  CHECK(layer_cycles(dw, 1) == 16 * 16 * 40);
  CHECK(layer_cycles(dw, 3) == (16 * 16 * 40 + 2) / 3);
  CHECK_THROWS_AS(layer_cycles(dw, 41), ConfigError);
}

TEST_CASE("property: dwconv cycles are non-increasing in s_dw and exact at s_dw = 1") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ch(1, 200), hw(1, 40), kk(1, 3);
  for (int iter = 0; iter < 200; ++iter) {
    const int c = ch(rng), h = hw(rng), k = 2 * kk(rng) - 1;
    Network net;
    net.input_shape = {c, h, h};
    net.layers = {dwconv("dw", k, c, 1, k / 2)};
    const Layer l = infer_shapes(net).layers[0];
    CHECK(layer_cycles(l, 1) == static_cast<std::int64_t>(l.h_out) * l.w_out * c);
    std::int64_t prev = layer_cycles(l, 1);
    for (int s = 2; s <= c; ++s) {
      const std::int64_t cur = layer_cycles(l, s);
      REQUIRE(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("property: conv matrix area equals its weight count") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ch(1, 300), k(1, 7);
  for (int iter = 0; iter < 500; ++iter) {
    Layer l = conv("c", k(rng), ch(rng), ch(rng));
    l.k_w = k(rng);
    l.h_out = l.w_out = 1;
    CHECK(layer_matrix_dims(l).area() == static_cast<std::int64_t>(l.k_h) * l.k_w * l.c_in * l.c_out);
  }
}

TEST_CASE("property: shape inference is idempotent and deterministic") {
  for (const char* name : {"squeezenet_v1_0", "mobilenetv3_small", "resnet18"}) {
    const Network a = load_model(name);
    CHECK(infer_shapes(a) == a);
    CHECK(load_model(name) == a);
  }
}

TEST_CASE("document round trip and digest stability") {
  const Network net = load_model("mobilenetv3_small");
  const Network back = infer_shapes(network_from_json(network_to_json(net)));
  CHECK(back == net);
  CHECK(network_digest(back) == network_digest(net));

  const HWConfig a = parse_hw(R"({"xbar_rows": 128, "xbar_cols": 128, "num_xbars": 10, "s_dw": 4})");
  const HWConfig b = parse_hw(R"({ "s_dw":4, "num_xbars":10,  "xbar_cols":128, "xbar_rows":128 })");
  CHECK(a == b);
  CHECK(hw_digest(a) == hw_digest(b));
  CHECK(digest_hex("abc").size() == 16);
  CHECK_THROWS_AS(parse_hw(R"({"xbar_rows": 0})"), ParseError);
  CHECK_THROWS_AS(parse_hw(R"({"s_dw": 0})"), ParseError);
}

TEST_CASE("branches: concatenated inputs and fc flatten") {
  const Network net = infer_shapes(parse_network(R"({"input_shape": [3, 8, 8], "layers": [
    {"name": "a", "kind": "conv", "k": 1, "c_in": 3, "c_out": 4},
    {"name": "b", "kind": "conv", "k": 3, "c_in": 3, "c_out": 6, "padding": 1, "input": "input"},
    {"name": "cat", "kind": "conv", "k": 1, "c_in": 10, "c_out": 2, "input": ["a", "b"]},
    {"name": "head", "kind": "fc", "c_in": 128, "c_out": 5}]})"));
  CHECK(net.layers[2].h_out == 8);
  CHECK(net.layers[3].h_out == 1);

  CHECK_THROWS_AS(infer_shapes(parse_network(R"({"input_shape": [3, 8, 8], "layers": [
    {"name": "a", "kind": "conv", "k": 1, "c_in": 3, "c_out": 4},
    {"name": "b", "kind": "conv", "k": 1, "c_in": 3, "c_out": 4, "stride": 2, "input": "input"},
    {"name": "cat", "kind": "conv", "k": 1, "c_in": 8, "c_out": 2, "input": ["a", "b"]}]})")),
                  ShapeError);
}
