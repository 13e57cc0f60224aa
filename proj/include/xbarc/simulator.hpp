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
 * @file simulator.hpp
 * @brief Cycle-granular discrete-event execution of a packing plan.
 *
 * Each (sample, layer) pair is one stage. A stage lasts ceil(C / x) cycles,
 * where C is the slowest box of the layer and x its copy count, and holds
 * every crossbar that hosts any box of the layer for its whole duration.
 *
 * Stage (s, i) becomes eligible when (s, i-1) finishes; sample s enters the
 * pipeline when (s-1, 0) finishes. Eligible stages are served in
 * (eligibility time, sample, layer) order and start as soon as all their
 * crossbars are free at the same time.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xbarc/network.hpp"
#include "xbarc/packing.hpp"

namespace xbarc {

struct Stage {
  int layer = 0;
  std::int64_t duration = 1;
  /// Sorted container indices.
  std::vector<int> crossbars;
};

struct TraceEvent {
  enum class Kind { Start, Finish };
  std::int64_t time = 0;
  Kind kind = Kind::Start;
  std::int64_t sample = 0;
  int layer = 0;
  int container = 0;
};

struct SimReport {
  std::int64_t n_samples = 0;
  std::int64_t total_cycles = 0;
  std::vector<std::int64_t> per_sample_latency;
  std::vector<std::int64_t> busy_cycles;
  /// Cycles eligible stages spent waiting for crossbars.
  std::int64_t structural_stall_cycles = 0;
  /// Cycles a stage's crossbars sat ready while it waited for its predecessor.
  std::int64_t data_stall_cycles = 0;
  /// Sum of busy cycles over (containers * total_cycles).
  double utilization_time = 0.0;
  std::string config_digest;
  std::vector<TraceEvent> trace;
};

/// Per-layer stages of a plan. Throws ConfigError when a layer of `net` has
/// no placement or the plan references layers outside it.
std::vector<Stage> build_stages(const PackingPlan& plan, const Network& net);

SimReport simulate_stages(std::span<const Stage> stages, int n_containers, std::int64_t n_samples,
                          bool trace = false);

SimReport simulate(const PackingPlan& plan, const Network& net, std::int64_t n_samples, bool trace = false);

/// baseline.total_cycles / report.total_cycles.
double speedup(const SimReport& report, const SimReport& baseline);

nlohmann::ordered_json report_to_json(const SimReport& report);
/// CSV with header time,event,sample,layer,container.
std::string trace_csv(const SimReport& report);

}  // namespace xbarc
