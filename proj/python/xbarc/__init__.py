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
"""Python interface to the xbarc crossbar compiler."""

import json
from pathlib import Path
from typing import Any, Optional, Union

from . import _xbarc
from ._xbarc import (
    ConfigError,
    DuplicationInfeasible,
    Error,
    IoError,
    PackingInfeasible,
    ParseError,
    SearchInfeasible,
    ShapeError,
    __version__,
)

Doc = Union[str, dict, Path]

MODELS_DIR = Path(__file__).parent / "models"
if not MODELS_DIR.is_dir():
    # Editable install: the package runs from the source tree.
    MODELS_DIR = Path(__file__).resolve().parents[2] / "models"


def _text(doc: Doc) -> str:
    if isinstance(doc, dict):
        return json.dumps(doc)
    if isinstance(doc, Path):
        return doc.read_text()
    return doc


def load_model(name: str) -> dict:
    """Bundled network or hardware document by file stem."""
    return json.loads((MODELS_DIR / f"{name}.json").read_text())


def compile(network: Doc, hw: Doc, duplicate: bool = False, isaac: bool = False) -> dict:
    return json.loads(_xbarc.compile(_text(network), _text(hw), duplicate, isaac))


def simulate(plan: Doc, network: Doc, samples: int = 1) -> dict:
    return json.loads(_xbarc.simulate(_text(plan), _text(network), samples))


def utilization(plan: Doc) -> float:
    return _xbarc.utilization(_text(plan))


def baseline_containers(network: Doc, hw: Doc) -> int:
    return _xbarc.baseline_containers(_text(network), _text(hw))


def network_digest(network: Doc) -> str:
    return _xbarc.network_digest(_text(network))


def search(hw: Doc, population: int = 50, generations: int = 100, mutation: float = 0.25, seed: int = 1,
           prefer: str = "speed", space: Optional[Doc] = None, samples: int = 1, threads: int = 0) -> dict[str, Any]:
    out = _xbarc.search(_text(hw), population, generations, mutation, seed, prefer,
                        None if space is None else _text(space), samples, threads)
    out["chosen_network"] = json.loads(out["chosen_network"])
    return out


__all__ = [
    "ConfigError", "DuplicationInfeasible", "Error", "IoError", "PackingInfeasible", "ParseError",
    "SearchInfeasible", "ShapeError", "__version__", "MODELS_DIR", "load_model", "compile", "simulate",
    "utilization", "baseline_containers", "network_digest", "search",
]
