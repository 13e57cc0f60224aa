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

#include <set>

#include "test_support.hpp"
#include "xbarc/baseline.hpp"
#include "xbarc/error.hpp"

using namespace xbarc;
using namespace xbarc::test;

TEST_CASE("one fc box takes one container") {
  Network net;
  net.input_shape = {16, 1, 1};
  net.layers = {fc("f", 16, 4)};
  const auto plan = isaac_map(infer_shapes(net), hw128());
  CHECK(plan.containers_used == 1);
  CHECK(plan.placements.size() == 1);
}

TEST_CASE("every container holds exactly one box at the origin") {
  for (const char* name : {"squeezenet_v1_0", "mobilenetv3_small", "resnet18"}) {
    const Network net = load_model(name);
    const auto plan = isaac_map(net, hw128(0, 20));
    const auto boxes = partition_network(net, hw128());
    CHECK(plan.containers_used == static_cast<int>(boxes.size()));
    CHECK(isaac_container_count(net, hw128()) == plan.containers_used);
    std::set<int> used;
    std::int64_t area = 0;
    for (const auto& p : plan.placements) {
      CHECK(used.insert(p.container).second);
      CHECK(p.x == 0);
      CHECK(p.y == 0);
      area += p.box.area();
    }
    CHECK(check_plan(plan).empty());
    const double mean = static_cast<double>(area) / static_cast<double>(boxes.size());
    CHECK(utilization(plan) == doctest::Approx(mean / (128.0 * 128.0)));
  }
}

TEST_CASE("squeezenet and mobilenet baselines land near the reported utilization") {
  CHECK(utilization(isaac_map(load_model("squeezenet_v1_0"), hw128())) == doctest::Approx(0.55).epsilon(0.2));
  CHECK(utilization(isaac_map(load_model("mobilenetv3_small"), hw128())) == doctest::Approx(0.45).epsilon(0.2));
}

TEST_CASE("packing never needs more containers than the baseline") {
  for (const char* name : {"squeezenet_v1_0", "mobilenetv3_small", "resnet18"}) {
    const Network net = load_model(name);
    CHECK(pack(partition_network(net, hw128()), hw128()).containers_used <= isaac_container_count(net, hw128()));
  }
}

TEST_CASE("budget below the box count is infeasible") {
  const Network net = load_model("squeezenet_v1_0");
  const int n = isaac_container_count(net, hw128());
  CHECK_NOTHROW(isaac_map(net, hw128(n)));
  CHECK_THROWS_AS(isaac_map(net, hw128(n - 1)), PackingInfeasible);
}
