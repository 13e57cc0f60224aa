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

// xbarc command-line driver: compile, simulate, search.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xbarc/baseline.hpp"
#include "xbarc/compile.hpp"
#include "xbarc/error.hpp"
#include "xbarc/nas.hpp"
#include "xbarc/network.hpp"
#include "xbarc/packing.hpp"
#include "xbarc/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace xbarc;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kParse = 2, kInfeasiblePacking = 3, kInfeasibleSearch = 4, kIo = 5 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
auto parse_file(const std::string& path, F parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

/// Collects output files and writes them only once every computation is done.
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  void add_json(std::string name, const ordered_json& doc) { add(std::move(name), doc.dump(2) + "\n"); }

  void flush() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
    for (const auto& [name, content] : files_) {
      const fs::path path = fs::path(dir_) / name;
      std::ofstream out(path, std::ios::binary);
      if (!out || !(out << content)) throw IoError("cannot write '" + path.string() + "'");
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("XBARC_OUT_DIR"); env && *env) return env;
  return ".";
}

ordered_json manifest(const std::string& command, const std::vector<std::string>& argv, ordered_json digests,
                      const std::string& started, std::optional<std::uint64_t> seed = std::nullopt) {
  ordered_json m;
  m["command"] = command;
  m["tool_version"] = XBARC_VERSION;
  m["argv"] = argv;
  m["digests"] = std::move(digests);
  if (seed) m["seed"] = *seed;
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  return m;
}

ordered_json plan_summary(const PackingPlan& plan, std::span<const LayerBox> single_copy, const Network& net) {
  ordered_json s;
  s["layers"] = net.size();
  s["boxes"] = single_copy.size();
  s["placed_boxes"] = plan.placements.size();
  s["containers_used"] = plan.containers_used;
  s["utilization"] = utilization(plan);
  s["utilization_denominator"] = "containers_used";
  s["budget"] = plan.hw.num_xbars;
  s["s_dw"] = plan.hw.s_dw;
  s["copies"] = plan.duplication.copies;
  return s;
}

// ---------------------------------------------------------------------------
// compile

struct CompileArgs {
  std::string network, hw, out_dir;
  int sdw = 0;
  int budget = -1;
  bool duplicate = false, isaac = false, no_pack = false;
};

int run_compile(const CompileArgs& a, const std::vector<std::string>& argv) {
  const std::string started = utc_now();
  Network net = parse_file(a.network, parse_network);
  HWConfig hw = parse_file(a.hw, parse_hw);
  if (a.sdw > 0) hw.s_dw = a.sdw;
  if (a.budget >= 0) hw.num_xbars = a.budget;
  hw.validate();
  net = infer_shapes(std::move(net));

  Outputs out(resolve_out_dir(a.out_dir));
  ordered_json summary;
  summary["network"] = a.network;
  summary["network_digest"] = network_digest(net);
  summary["hw_digest"] = hw_digest(hw);
  ordered_json digests{{"network", network_digest(net)}, {"hw", hw_digest(hw)}};

  if (a.isaac) {
    const PackingPlan plan = isaac_map(net, hw);
    HWConfig base_hw = hw;
    base_hw.s_dw = 1;
    const auto boxes = partition_network(net, base_hw);
    summary["mode"] = "isaac";
    summary.update(plan_summary(plan, boxes, net));
    const auto doc = plan_to_json(plan);
    digests["plan"] = digest_hex(doc.dump());
    out.add_json("plan.json", doc);
  } else if (a.no_pack) {
    const auto boxes = partition_network(net, hw);
    summary["mode"] = "partition";
    summary["layers"] = net.size();
    summary["boxes"] = boxes.size();
    auto arr = ordered_json::array();
    for (const auto& b : boxes)
      arr.push_back({{"layer", b.layer_idx}, {"part", {b.part_row, b.part_col}}, {"h", b.height}, {"w", b.width},
                     {"cycles", b.cycles}});
    out.add_json("boxes.json", arr);
  } else {
    CompileOptions opts;
    opts.duplicate = a.duplicate;
    const CompileResult r = compile_network(net, hw, opts);
    summary["mode"] = a.duplicate ? "pack+duplicate" : "pack";
    summary.update(plan_summary(r.plan, r.boxes, net));
    summary["baseline_containers"] = isaac_container_count(net, hw);
    if (a.duplicate) summary["solver_bottleneck_copies"] = r.solver_bottleneck_copies;
    const auto doc = plan_to_json(r.plan);
    digests["plan"] = digest_hex(doc.dump());
    out.add_json("plan.json", doc);
  }
  out.add_json("summary.json", summary);
  out.add_json("manifest.json", manifest("compile", argv, digests, started));
  out.flush();
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string plan, network, baseline, out_dir;
  std::int64_t samples = 1;
  bool sweep = false, trace = false;
};

PackingPlan load_plan(const std::string& path) {
  return parse_file(path, [](const std::string& text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed plan document: ") + e.what());
    }
    return plan_from_json(doc);
  });
}

int run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  const std::string started = utc_now();
  const PackingPlan plan = load_plan(a.plan);
  const Network net = infer_shapes(parse_file(a.network, parse_network));
  std::optional<PackingPlan> baseline;
  if (!a.baseline.empty()) baseline = load_plan(a.baseline);

  Outputs out(resolve_out_dir(a.out_dir));
  ordered_json digests{{"network", network_digest(net)}, {"plan", digest_hex(plan_to_json(plan).dump())}};
  if (a.sweep) {
    std::ostringstream csv;
    csv << "samples,total_cycles,mean_latency,utilization_time";
    if (baseline) csv << ",baseline_cycles,speedup";
    csv << "\n";
    for (std::int64_t n = 1; n <= 1024; n *= 2) {
      const SimReport r = simulate(plan, net, n);
      std::int64_t lat = 0;
      for (auto l : r.per_sample_latency) lat += l;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%lld,%lld,%.6f,%.6f", static_cast<long long>(n),
                    static_cast<long long>(r.total_cycles), static_cast<double>(lat) / static_cast<double>(n),
                    r.utilization_time);
      csv << buf;
      if (baseline) {
        const SimReport b = simulate(*baseline, net, n);
        std::snprintf(buf, sizeof buf, ",%lld,%.6f", static_cast<long long>(b.total_cycles), speedup(r, b));
        csv << buf;
      }
      csv << "\n";
    }
    out.add("sweep.csv", csv.str());
    std::cout << csv.str();
  } else {
    const SimReport r = simulate(plan, net, a.samples, a.trace);
    ordered_json doc = report_to_json(r);
    if (baseline) {
      const SimReport b = simulate(*baseline, net, a.samples);
      doc["baseline_total_cycles"] = b.total_cycles;
      doc["speedup"] = speedup(r, b);
    }
    digests["report"] = r.config_digest;
    out.add_json("report.json", doc);
    if (a.trace) out.add("trace.csv", trace_csv(r));
    std::cout << doc.dump(2) << "\n";
  }
  out.add_json("manifest.json", manifest("simulate", argv, digests, started));
  out.flush();
  return kOk;
}

// ---------------------------------------------------------------------------
// search

struct SearchArgs {
  std::string space, hw, reference, accuracy_table, out_dir;
  std::string prefer = "speed";
  int pop = 50, gens = 100, sdw = 0, budget = -1;
  unsigned threads = 0;
  double mut = 0.25, budget_scale = 0.0;
  std::uint64_t seed = 1;
  std::int64_t samples = 1;
};

ordered_json candidate_json(const Candidate& c) {
  ordered_json j;
  j["genome"] = c.genome.genes;
  j["genome_digest"] = c.genome.digest();
  j["surrogate_accuracy"] = c.accuracy;
  j["total_cycles"] = c.total_cycles;
  j["containers_used"] = c.containers_used;
  j["utilization"] = c.utilization;
  j["feasible"] = c.feasible;
  return j;
}

int run_search(const SearchArgs& a, const std::vector<std::string>& argv) {
  const std::string started = utc_now();
  SearchSpace space = a.space.empty() ? SearchSpace::mobilenet_v3_small() : parse_file(a.space, parse_search_space);
  HWConfig hw = a.hw.empty() ? HWConfig{} : parse_file(a.hw, parse_hw);
  if (a.sdw > 0) hw.s_dw = a.sdw;
  if (a.budget >= 0) hw.num_xbars = a.budget;
  if (a.budget_scale > 0.0) {
    if (a.reference.empty()) throw ConfigError("--budget-scale needs --reference-network");
    const Network ref = infer_shapes(parse_file(a.reference, parse_network));
    hw.num_xbars = static_cast<int>(std::floor(a.budget_scale * isaac_container_count(ref, hw)));
  }
  hw.validate();
  AccuracySurrogate surrogate = a.accuracy_table.empty()
                                    ? AccuracySurrogate::calibrated(space)
                                    : parse_file(a.accuracy_table, AccuracySurrogate::from_table_json);

  Evaluator evaluator(space, hw, surrogate, a.samples, a.threads);
  NsgaParams params;
  params.population = a.pop;
  params.generations = a.gens;
  params.mutation = a.mut;
  params.seed = a.seed;
  const Preference pref = a.prefer == "acc" ? Preference::Accuracy : Preference::Speed;
  const SearchResult result = search(evaluator, pref, params);

  const Network chosen_net = decode_genome(result.chosen.genome, space);
  CompileOptions opts;
  opts.duplicate = hw.bounded();
  const CompileResult compiled = compile_network(chosen_net, hw, opts);
  const SimReport report = simulate(compiled.plan, chosen_net, a.samples);

  Outputs out(resolve_out_dir(a.out_dir));
  out.add("pareto.csv", pareto_csv(result.front));
  std::ostringstream hv;
  hv << "generation,hypervolume\n";
  for (std::size_t g = 0; g < result.hypervolume_history.size(); ++g) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", g, result.hypervolume_history[g]);
    hv << buf;
  }
  out.add("hypervolume.csv", hv.str());
  ordered_json chosen;
  chosen["preference"] = a.prefer;
  chosen["candidate"] = candidate_json(result.chosen);
  chosen["network"] = network_to_json(chosen_net);
  chosen["compile"] = plan_summary(compiled.plan, compiled.boxes, chosen_net);
  chosen["report"] = report_to_json(report);
  out.add_json("chosen.json", chosen);
  out.add_json("chosen_plan.json", plan_to_json(compiled.plan));
  ordered_json digests{{"space", digest_hex(search_space_to_json(space).dump())}, {"hw", hw_digest(hw)}};
  out.add_json("manifest.json", manifest("search", argv, digests, started, a.seed));
  out.flush();

  std::cout << "front: " << result.front.size() << " candidates, budget " << hw.num_xbars << " crossbars\n";
  std::cout << "chosen: " << candidate_json(result.chosen).dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"xbarc: crossbar compiler, simulator and architecture search"};
  app.set_version_flag("--version", std::string(XBARC_VERSION));
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Partition, duplicate and pack a network");
  compile->add_option("--network", ca.network, "Network document")->required();
  compile->add_option("--hw", ca.hw, "Hardware document")->required();
  compile->add_option("--sdw", ca.sdw, "Depthwise split factor (overrides the hardware file)")
      ->check(CLI::PositiveNumber);
  compile->add_option("--budget", ca.budget, "Crossbar budget, 0 = unbounded (overrides the hardware file)")
      ->check(CLI::NonNegativeNumber);
  compile->add_flag("--duplicate", ca.duplicate, "Duplicate bottleneck layers into spare area");
  compile->add_flag("--isaac", ca.isaac, "One box per crossbar baseline");
  compile->add_flag("--no-pack", ca.no_pack, "Skip the packer (partition only unless --isaac)");
  compile->add_option("--out-dir", ca.out_dir, "Output directory (default: $XBARC_OUT_DIR or .)");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate a compiled plan");
  sim->add_option("--plan", sa.plan, "Plan document")->required();
  sim->add_option("--network", sa.network, "Network document")->required();
  sim->add_option("--samples", sa.samples, "Number of inference samples")->check(CLI::PositiveNumber);
  sim->add_option("--baseline", sa.baseline, "Baseline plan for speedup columns");
  sim->add_flag("--sweep", sa.sweep, "Sweep 1..1024 samples in powers of two");
  sim->add_flag("--trace", sa.trace, "Write a per-event trace CSV");
  sim->add_option("--out-dir", sa.out_dir, "Output directory (default: $XBARC_OUT_DIR or .)");

  SearchArgs ra;
  auto* srch = app.add_subcommand("search", "NSGA-II architecture search");
  srch->add_option("--space", ra.space, "Search-space document (default: built-in MobileNetV3-small space)");
  srch->add_option("--hw", ra.hw, "Hardware document");
  srch->add_option("--budget", ra.budget, "Crossbar budget (overrides the hardware file)")
      ->check(CLI::NonNegativeNumber);
  srch->add_option("--reference-network", ra.reference, "Network whose baseline container count scales the budget");
  srch->add_option("--budget-scale", ra.budget_scale, "Budget as a multiple of the reference baseline count")
      ->check(CLI::PositiveNumber);
  srch->add_option("--pop", ra.pop, "Population size")->check(CLI::Range(2, 100000));
  srch->add_option("--gens", ra.gens, "Generations")->check(CLI::NonNegativeNumber);
  srch->add_option("--mut", ra.mut, "Per-offspring mutation probability")->check(CLI::Range(0.0, 1.0));
  srch->add_option("--seed", ra.seed, "Random seed");
  srch->add_option("--prefer", ra.prefer, "Pick from the front")->check(CLI::IsMember({"acc", "speed"}));
  srch->add_option("--samples", ra.samples, "Samples per latency evaluation")->check(CLI::PositiveNumber);
  srch->add_option("--sdw", ra.sdw, "Depthwise split factor")->check(CLI::PositiveNumber);
  srch->add_option("--threads", ra.threads, "Evaluation threads (0 = hardware concurrency)");
  srch->add_option("--accuracy-table", ra.accuracy_table, "Accuracy lookup table keyed by genome digest");
  srch->add_option("--out-dir", ra.out_dir, "Output directory (default: $XBARC_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*compile) return run_compile(ca, args);
    if (*sim) return run_simulate(sa, args);
    if (*srch) return run_search(ra, args);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const PackingInfeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasiblePacking;
  } catch (const SearchInfeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasibleSearch;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kParse;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
