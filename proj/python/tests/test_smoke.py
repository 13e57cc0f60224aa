# Copyright 2026 The xbarc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import pytest

xbarc = pytest.importorskip("xbarc")

TWO_LAYER = {
    "input_shape": [1, 2, 2],
    "layers": [
        {"name": "a", "kind": "conv", "k": 1, "c_in": 1, "c_out": 8},
        {"name": "b", "kind": "conv", "k_h": 2, "k_w": 1, "c_in": 8, "c_out": 8},
    ],
}


def hw(num_xbars=0, s_dw=1):
    return {"xbar_rows": 128, "xbar_cols": 128, "num_xbars": num_xbars, "s_dw": s_dw}


def test_two_layer_cycles():
    plan = xbarc.compile(TWO_LAYER, hw())
    assert plan["format"] == "xbarc-plan/1"
    assert xbarc.simulate(plan, TWO_LAYER, 1)["total_cycles"] == 6
    assert xbarc.simulate(plan, TWO_LAYER, 3)["total_cycles"] == 14


def test_squeezenet_packing_beats_baseline():
    net = xbarc.load_model("squeezenet_v1_0")
    packed = xbarc.compile(net, hw())
    base = xbarc.compile(net, hw(), isaac=True)
    assert xbarc.baseline_containers(net, hw()) == base["containers_used"]
    assert packed["containers_used"] < base["containers_used"]
    assert xbarc.utilization(packed) > xbarc.utilization(base)


def test_duplication_speeds_up_mobilenet():
    net = xbarc.load_model("mobilenetv3_small")
    n = xbarc.baseline_containers(net, hw())
    dup = xbarc.compile(net, hw(n), duplicate=True)
    assert dup["containers_used"] <= n
    base = xbarc.compile(net, hw(), isaac=True)
    assert xbarc.simulate(dup, net)["total_cycles"] < xbarc.simulate(base, net)["total_cycles"]


def test_errors_map_to_exceptions():
    with pytest.raises(xbarc.ParseError):
        xbarc.compile("{\"layers\": [", hw())
    with pytest.raises(xbarc.PackingInfeasible):
        xbarc.compile(xbarc.load_model("squeezenet_v1_0"), hw(3))
    assert issubclass(xbarc.SearchInfeasible, xbarc.Error)


def test_search_is_reproducible():
    a = xbarc.search(hw(150), population=6, generations=2, seed=3)
    b = xbarc.search(hw(150), population=6, generations=2, seed=3, threads=1)
    assert a["pareto_csv"] == b["pareto_csv"]
    assert len(a["hypervolume"]) == 3
    assert a["chosen_network"]["layers"]
