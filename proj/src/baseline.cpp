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

#include "xbarc/baseline.hpp"

#include "xbarc/error.hpp"

namespace xbarc {

namespace {

std::vector<LayerBox> unsplit_boxes(const Network& net, const HWConfig& hw) {
  HWConfig plain = hw;
  plain.s_dw = 1;
  return partition_network(net, plain);
}

}  // namespace

int isaac_container_count(const Network& net, const HWConfig& hw) {
  return static_cast<int>(unsplit_boxes(net, hw).size());
}

PackingPlan isaac_map(const Network& net, const HWConfig& hw) {
  const auto boxes = unsplit_boxes(net, hw);
  if (hw.bounded() && boxes.size() > static_cast<std::size_t>(hw.num_xbars)) {
    std::int64_t area = 0;
    for (std::size_t i = hw.num_xbars; i < boxes.size(); ++i) area += boxes[i].area();
    throw PackingInfeasible("reference mapping needs " + std::to_string(boxes.size()) + " crossbars, budget is " +
                                std::to_string(hw.num_xbars),
                            boxes.size() - hw.num_xbars, area);
  }
  PackingPlan plan;
  plan.hw = hw;
  plan.hw.s_dw = 1;
  plan.duplication = DuplicationPlan::identity(net.size());
  plan.network_digest = network_digest(net);
  for (std::size_t i = 0; i < boxes.size(); ++i)
    plan.placements.push_back({boxes[i], static_cast<int>(i), 0, 0});
  plan.containers_used = static_cast<int>(boxes.size());
  return plan;
}

}  // namespace xbarc
