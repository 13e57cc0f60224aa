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

#include "xbarc/simulator.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "xbarc/error.hpp"

namespace xbarc {

std::vector<Stage> build_stages(const PackingPlan& plan, const Network& net) {
  const std::size_t n = net.size();
  std::vector<std::int64_t> cycles(n, 0);
  std::vector<std::vector<int>> crossbars(n);
  for (const auto& p : plan.placements) {
    const int l = p.box.layer_idx;
    if (l < 0 || static_cast<std::size_t>(l) >= n)
      throw ConfigError("plan references layer " + std::to_string(l) + " but the network has " + std::to_string(n));
    if (p.container < 0 || p.container >= plan.containers_used)
      throw ConfigError("plan placement refers to container " + std::to_string(p.container) + " outside the plan");
    cycles[l] = std::max(cycles[l], p.box.cycles);
    crossbars[l].push_back(p.container);
  }
  const auto copies = plan_copies(plan, n);

  std::vector<Stage> stages(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (crossbars[i].empty())
      throw ConfigError("plan has no boxes for layer " + std::to_string(i) + " ('" + net.layers[i].name + "')");
    std::sort(crossbars[i].begin(), crossbars[i].end());
    crossbars[i].erase(std::unique(crossbars[i].begin(), crossbars[i].end()), crossbars[i].end());
    stages[i].layer = static_cast<int>(i);
    stages[i].duration = std::max<std::int64_t>(1, (cycles[i] + copies[i] - 1) / copies[i]);
    stages[i].crossbars = std::move(crossbars[i]);
  }
  return stages;
}

SimReport simulate_stages(std::span<const Stage> stages, int n_containers, std::int64_t n_samples, bool trace) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (stages.empty()) throw ConfigError("nothing to simulate");
  for (const auto& st : stages) {
    if (st.duration < 1) throw ConfigError("stage duration must be >= 1");
    if (st.crossbars.empty()) throw ConfigError("stage without crossbars");
    for (int c : st.crossbars)
      if (c < 0 || c >= n_containers) throw ConfigError("stage crossbar outside the plan");
  }

  const int n_layers = static_cast<int>(stages.size());
  SimReport report;
  report.n_samples = n_samples;
  report.per_sample_latency.assign(n_samples, 0);
  report.busy_cycles.assign(n_containers, 0);

  std::vector<char> busy(n_containers, 0);
  std::vector<std::int64_t> released(n_containers, 0);
  std::vector<std::int64_t> injected(n_samples, 0);

  using Key = std::tuple<std::int64_t, std::int64_t, int>;  // (time, sample, layer)
  std::set<Key> pending;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> running;

  auto emit = [&](std::int64_t time, TraceEvent::Kind kind, std::int64_t s, int l) {
    if (!trace) return;
    for (int c : stages[l].crossbars) report.trace.push_back({time, kind, s, l, c});
  };

  pending.emplace(0, 0, 0);
  std::int64_t now = 0;
  while (!pending.empty() || !running.empty()) {
    for (auto it = pending.begin(); it != pending.end();) {
      const auto [eligible, s, l] = *it;
      const Stage& st = stages[l];
      const bool free = std::none_of(st.crossbars.begin(), st.crossbars.end(), [&](int c) { return busy[c]; });
      if (!free) {
        ++it;
        continue;
      }
      std::int64_t ready = 0;
      for (int c : st.crossbars) {
        busy[c] = 1;
        ready = std::max(ready, released[c]);
        report.busy_cycles[c] += st.duration;
      }
      report.structural_stall_cycles += now - eligible;
      if (l > 0) report.data_stall_cycles += std::max<std::int64_t>(0, eligible - ready);
      running.emplace(now + st.duration, s, l);
      emit(now, TraceEvent::Kind::Start, s, l);
      it = pending.erase(it);
    }
    if (running.empty()) break;

    now = std::get<0>(running.top());
    while (!running.empty() && std::get<0>(running.top()) == now) {
      const auto [t, s, l] = running.top();
      running.pop();
      for (int c : stages[l].crossbars) {
        busy[c] = 0;
        released[c] = t;
      }
      emit(t, TraceEvent::Kind::Finish, s, l);
      if (l + 1 < n_layers) {
        pending.emplace(t, s, l + 1);
      } else {
        report.per_sample_latency[s] = t - injected[s];
      }
      if (l == 0 && s + 1 < n_samples) {
        injected[s + 1] = t;
        pending.emplace(t, s + 1, 0);
      }
      report.total_cycles = std::max(report.total_cycles, t);
    }
  }

  std::int64_t busy_total = 0;
  for (auto b : report.busy_cycles) busy_total += b;
  if (n_containers > 0 && report.total_cycles > 0)
    report.utilization_time =
        static_cast<double>(busy_total) / (static_cast<double>(n_containers) * static_cast<double>(report.total_cycles));
  return report;
}

SimReport simulate(const PackingPlan& plan, const Network& net, std::int64_t n_samples, bool trace) {
  if (!plan.network_digest.empty() && plan.network_digest != network_digest(net))
    throw ConfigError("plan was compiled for network " + plan.network_digest + ", got " + network_digest(net));
  const auto stages = build_stages(plan, net);
  SimReport report = simulate_stages(stages, plan.containers_used, n_samples, trace);
  report.config_digest = digest_hex(plan_to_json(plan).dump() + "|" + std::to_string(n_samples));
  return report;
}

double speedup(const SimReport& report, const SimReport& baseline) {
  if (report.total_cycles <= 0 || baseline.total_cycles <= 0) throw ConfigError("speedup of an empty report");
  return static_cast<double>(baseline.total_cycles) / static_cast<double>(report.total_cycles);
}

nlohmann::ordered_json report_to_json(const SimReport& r) {
  nlohmann::ordered_json doc;
  doc["format"] = "xbarc-report/1";
  doc["config_digest"] = r.config_digest;
  doc["n_samples"] = r.n_samples;
  doc["total_cycles"] = r.total_cycles;
  doc["per_sample_latency"] = r.per_sample_latency;
  doc["busy_cycles"] = r.busy_cycles;
  doc["structural_stall_cycles"] = r.structural_stall_cycles;
  doc["data_stall_cycles"] = r.data_stall_cycles;
  doc["utilization_time"] = r.utilization_time;
  return doc;
}

std::string trace_csv(const SimReport& r) {
  std::ostringstream os;
  os << "time,event,sample,layer,container\n";
  for (const auto& e : r.trace)
    os << e.time << ',' << (e.kind == TraceEvent::Kind::Start ? "start" : "finish") << ',' << e.sample << ','
       << e.layer << ',' << e.container << '\n';
  return os.str();
}

}  // namespace xbarc
