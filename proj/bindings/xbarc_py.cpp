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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "xbarc/baseline.hpp"
#include "xbarc/compile.hpp"
#include "xbarc/error.hpp"
#include "xbarc/nas.hpp"
#include "xbarc/packing.hpp"
#include "xbarc/simulator.hpp"

namespace py = pybind11;
using namespace xbarc;

namespace {

// Documents cross the boundary as JSON text; the Python wrapper converts.

Network load_network(const std::string& text) { return infer_shapes(parse_network(text)); }

std::string compile_doc(const std::string& network, const std::string& hw_text, bool duplicate, bool isaac) {
  const Network net = load_network(network);
  const HWConfig hw = parse_hw(hw_text);
  if (isaac) return plan_to_json(isaac_map(net, hw)).dump();
  CompileOptions opts;
  opts.duplicate = duplicate;
  return plan_to_json(compile_network(net, hw, opts).plan).dump();
}

std::string simulate_doc(const std::string& plan, const std::string& network, std::int64_t samples) {
  const Network net = load_network(network);
  return report_to_json(simulate(plan_from_json(nlohmann::json::parse(plan)), net, samples)).dump();
}

double utilization_doc(const std::string& plan) { return utilization(plan_from_json(nlohmann::json::parse(plan))); }

int baseline_containers(const std::string& network, const std::string& hw_text) {
  return isaac_container_count(load_network(network), parse_hw(hw_text));
}

py::dict search_doc(const std::string& hw_text, int population, int generations, double mutation,
                    std::uint64_t seed, const std::string& prefer, const std::optional<std::string>& space_text,
                    std::int64_t samples, unsigned threads) {
  const SearchSpace space = space_text ? parse_search_space(*space_text) : SearchSpace::mobilenet_v3_small();
  const HWConfig hw = parse_hw(hw_text);
  NsgaParams params;
  params.population = population;
  params.generations = generations;
  params.mutation = mutation;
  params.seed = seed;
  if (prefer != "acc" && prefer != "speed") throw ConfigError("prefer must be 'acc' or 'speed'");
  SearchResult r;
  {
    py::gil_scoped_release release;
    Evaluator ev(space, hw, AccuracySurrogate::calibrated(space), samples, threads);
    r = search(ev, prefer == "acc" ? Preference::Accuracy : Preference::Speed, params);
  }
  py::dict out;
  out["pareto_csv"] = pareto_csv(r.front);
  out["hypervolume"] = r.hypervolume_history;
  out["chosen_genome"] = std::vector<int>(r.chosen.genome.genes.begin(), r.chosen.genome.genes.end());
  out["chosen_accuracy"] = r.chosen.accuracy;
  out["chosen_cycles"] = r.chosen.total_cycles;
  out["chosen_network"] = network_to_json(decode_genome(r.chosen.genome, space)).dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_xbarc, m) {
  m.doc() = "Crossbar compiler core";
  m.attr("__version__") = XBARC_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DuplicationInfeasible>(m, "DuplicationInfeasible", base.ptr());
  py::register_exception<PackingInfeasible>(m, "PackingInfeasible", base.ptr());
  py::register_exception<SearchInfeasible>(m, "SearchInfeasible", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.def("network_digest", [](const std::string& text) { return network_digest(load_network(text)); });
  m.def("compile", &compile_doc, py::arg("network"), py::arg("hw"), py::arg("duplicate") = false,
        py::arg("isaac") = false);
  m.def("simulate", &simulate_doc, py::arg("plan"), py::arg("network"), py::arg("samples") = 1);
  m.def("utilization", &utilization_doc, py::arg("plan"));
  m.def("baseline_containers", &baseline_containers, py::arg("network"), py::arg("hw"));
  m.def("search", &search_doc, py::arg("hw"), py::arg("population") = 50, py::arg("generations") = 100,
        py::arg("mutation") = 0.25, py::arg("seed") = 1, py::arg("prefer") = "speed",
        py::arg("space") = std::nullopt, py::arg("samples") = 1, py::arg("threads") = 0);
}
