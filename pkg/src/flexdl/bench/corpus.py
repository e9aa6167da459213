"""Workload corpus: bundled programs, facts I/O, desk-scale datasets.

The bundled datasets are tiny fixtures for tests and examples. Benchmark
datasets are generated on demand from seeded generators; their preset sizes
are chosen so a full representation grid runs in minutes of pure Python,
with --scale stretching them up or down from the 0.01 reference point.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

from ..errors import IoError, ParseError
from ..frontend import Program, parse_program
from .generators import Tuples, gen_random_graph

CORPUS_NAMES = ("tc", "reachability", "sg", "andersen")

_HERE = Path(__file__).resolve().parent / "data"


def corpus_path(name: str) -> Path:
    if name not in CORPUS_NAMES:
        raise KeyError(f"unknown corpus workload {name!r}")
    return _HERE / f"{name}.dl"


def corpus_program_text(name: str) -> str:
    return corpus_path(name).read_text(encoding="utf-8")


def corpus_program(name: str) -> Program:
    return parse_program(corpus_program_text(name))


def corpus_facts(name: str) -> dict[str, Tuples]:
    """The small bundled dataset for a corpus workload."""
    if name not in CORPUS_NAMES:
        raise KeyError(f"unknown corpus workload {name!r}")
    return read_facts_dir(_HERE / name)


def read_facts_dir(path: str | os.PathLike) -> dict[str, Tuples]:
    """All `<relation>.facts` files in a directory.

    Tab-separated decimal unsigned 64-bit integers, one tuple per line.
    """
    base = Path(path)
    try:
        entries = sorted(p for p in base.iterdir() if p.suffix == ".facts")
    except OSError as e:
        raise IoError(f"cannot read facts directory {base}: {e}") from e
    facts: dict[str, Tuples] = {}
    for p in entries:
        tuples: Tuples = []
        try:
            with open(p, "r", encoding="utf-8") as fh:
                for lineno, raw in enumerate(fh, start=1):
                    line = raw.rstrip("\n")
                    if not line:
                        continue
                    parts = line.split("\t")
                    try:
                        row = tuple(int(v) for v in parts)
                    except ValueError:
                        raise ParseError(f"bad integer in {line!r}",
                                         lineno, str(p))
                    if any(v < 0 or v > 2**64 - 1 for v in row):
                        raise ParseError("values must fit unsigned 64 bits",
                                         lineno, str(p))
                    tuples.append(row)
        except OSError as e:
            raise IoError(f"cannot read {p}: {e}") from e
        facts[p.stem] = tuples
    return facts


def write_facts_dir(path: str | os.PathLike, facts: dict[str, Tuples]) -> None:
    base = Path(path)
    try:
        base.mkdir(parents=True, exist_ok=True)
        for name, tuples in facts.items():
            with open(base / f"{name}.facts", "w", encoding="utf-8") as fh:
                for t in tuples:
                    fh.write("\t".join(str(v) for v in t) + "\n")
    except OSError as e:
        raise IoError(f"cannot write facts to {base}: {e}") from e


# Reference sizes at the 0.01 scale point: (nodes, edges) for the graph
# workloads, variable count for the pointer analysis. Edges scale linearly
# with the factor, nodes with its square root, keeping the density regime.
_GRAPH_PRESETS = {
    "tc": (240, 720),
    "reachability": (5000, 15000),
    "sg": (250, 500),
}
_ANDERSEN_VARS = 600


def desk_facts(name: str, scale: float = 0.01, seed: int = 0) -> dict[str, Tuples]:
    """A seeded benchmark dataset for one corpus workload."""
    f = scale / 0.01
    if f <= 0:
        raise ValueError("scale must be positive")
    if name in _GRAPH_PRESETS:
        n0, m0 = _GRAPH_PRESETS[name]
        n = max(4, round(n0 * math.sqrt(f)))
        m = max(1, min(round(m0 * f), n * (n - 1)))
        edges = gen_random_graph(n, m=m, seed=seed)
        facts = {"edge": edges}
        if name == "reachability":
            facts["seed"] = [(0,)]
        return facts
    if name == "andersen":
        return andersen_facts(max(8, round(_ANDERSEN_VARS * math.sqrt(f))),
                              seed=seed)
    raise KeyError(f"unknown corpus workload {name!r}")


def andersen_facts(nvars: int, seed: int = 0) -> dict[str, Tuples]:
    """Synthetic pointer-analysis input over `nvars` variables.

    Objects live in a separate id range above the variables. Assignment
    edges dominate, with a thinner sprinkling of loads and stores, which
    keeps the fixpoint from exploding quadratically.
    """
    import random
    rng = random.Random(seed)
    objs = range(nvars, nvars + max(1, nvars // 2))
    address_of = [(rng.randrange(nvars), rng.choice(list(objs)))
                  for _ in range(max(1, nvars // 2))]
    assign = [(rng.randrange(nvars), rng.randrange(nvars))
              for _ in range(nvars)]
    load = [(rng.randrange(nvars), rng.randrange(nvars))
            for _ in range(max(1, nvars // 6))]
    store = [(rng.randrange(nvars), rng.randrange(nvars))
             for _ in range(max(1, nvars // 6))]
    return {"address_of": sorted(set(address_of)),
            "assign": sorted(set(assign)),
            "load": sorted(set(load)),
            "store": sorted(set(store))}
