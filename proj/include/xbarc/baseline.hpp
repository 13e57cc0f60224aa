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

#include "xbarc/network.hpp"
#include "xbarc/packing.hpp"

namespace xbarc {

/// Reference mapping: every layer box gets a crossbar of its own at (0, 0).
/// No depthwise split, no duplication, no sharing. Throws PackingInfeasible
/// when the box count exceeds a set budget.
PackingPlan isaac_map(const Network& net, const HWConfig& hw);

/// Crossbars the reference mapping needs (its box count).
int isaac_container_count(const Network& net, const HWConfig& hw);

}  // namespace xbarc
