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

#include "test_support.hpp"
#include "xbarc/baseline.hpp"
#include "xbarc/compile.hpp"
#include "xbarc/error.hpp"
#include "xbarc/simulator.hpp"

using namespace xbarc;
using namespace xbarc::test;

namespace {

// Layer 0: 128x64 cells, 4 cycles. Layer 1: 64x64 cells, 1 cycle.
Network two_conv() {
  Network net;
  net.input_shape = {128, 2, 2};
  net.layers = {conv("a", 1, 128, 64), conv("b", 1, 64, 64, 2)};
  return infer_shapes(net);
}

}  // namespace

TEST_CASE("compile without duplication equals packing the partition") {
  const Network net = load_model("squeezenet_v1_0");
  const auto r = compile_network(net, hw128());
  const auto direct = pack(partition_network(net, hw128()), hw128());
  CHECK(r.plan.placements == direct.placements);
  CHECK(r.plan.network_digest == network_digest(net));
  CHECK(r.feasible());
}

TEST_CASE("duplication needs a bounded budget") {
  CHECK_THROWS_AS(try_compile(load_model("squeezenet_v1_0"), hw128(), {.duplicate = true}), ConfigError);
}

TEST_CASE("duplicated plans stay within budget and are sound") {
  for (const char* name : {"squeezenet_v1_0", "mobilenetv3_small"}) {
    const Network net = load_model(name);
    const int base = isaac_container_count(net, hw128());
    for (double scale : {0.8, 1.0, 1.2}) {
      const HWConfig hw = hw128(static_cast<int>(scale * base));
      const auto r = compile_network(net, hw, {.duplicate = true});
      CHECK(r.plan.containers_used <= hw.num_xbars);
      CHECK(check_plan(r.plan).empty());
      CHECK(r.plan.duplication.copies.size() == net.size());
      for (int x : r.plan.duplication.copies) CHECK(x >= 1);
      const auto& copies = r.plan.duplication.copies;
      const auto t = r.plan.duplication.bottleneck_layer;
      const auto cycles = layer_cycle_counts(r.boxes, net.size());
      for (std::size_t i = 0; i < net.size(); ++i)
        CHECK(static_cast<std::int64_t>(copies[i]) * cycles[t] >= static_cast<std::int64_t>(copies[t]) * cycles[i]);
      const auto fast = simulate(r.plan, net, 1);
      const auto slow = simulate(compile_network(net, hw128()).plan, net, 1);
      CHECK(fast.total_cycles <= slow.total_cycles);
    }
  }
}

TEST_CASE("packing failure lowers the bottleneck copy count") {
  // Area allows three copies of layer 0 plus one of layer 1, but copies of
  // one layer cannot share a crossbar and layer 1 cannot sit next to layer 0.
  const Network net = two_conv();
  HWConfig hw = hw128(2);
  const auto r = try_compile(net, hw, {.duplicate = true});
  CHECK(r.solver_bottleneck_copies == 3);
  CHECK(r.feasible());
  CHECK(r.plan.duplication.copies == std::vector<int>{1, 1});
  CHECK(r.plan.containers_used == 2);
}

TEST_CASE("a budget that cannot hold one copy is infeasible") {
  const Network net = load_model("squeezenet_v1_0");
  const auto r = try_compile(net, hw128(10), {.duplicate = true});
  CHECK_FALSE(r.feasible());
  CHECK(r.unplaced_area() > 0);
  CHECK_THROWS_AS(compile_network(net, hw128(10), {.duplicate = true}), PackingInfeasible);
  CHECK_THROWS_AS(compile_network(net, hw128(10)), PackingInfeasible);
}

TEST_CASE("depthwise split clamps to channel count per layer") {
  const Network net = load_model("mobilenetv3_small");
  const auto r = compile_network(net, hw128(0, 20));
  CHECK(r.feasible());
  for (const auto& b : r.boxes) CHECK(b.width >= 1);
}
