"""Experiment families for the benchmark runner.

Each family builds a grid of cells (program, facts, configuration) sized by
`scale`, where scale 1.0 means the full reference workload (about 100 MiB of
raw tuples) and the default 0.01 keeps a whole grid in the seconds-to-minutes
range. The full-scan combination is left out of timing grids: its cost grows
with the product of relation sizes and is off the chart at any scale, so it
would only stall the run (the correctness suites still cover it).
"""

from __future__ import annotations

import time

from ..engine import run_program
from ..engine.config import STRATEGIES, EvalConfig, uniform_config
from ..engine.counters import OpCounters
from ..engine.run import RelationRT
from ..engine.strategies import make_strategy
from ..frontend import parse_program
from ..profiler import profile_run
from ..selector import select_configuration
from ..storage import RepConfig
from .corpus import CORPUS_NAMES, corpus_program_text, desk_facts
from .generators import (
    INTERWEAVING_KEYS,
    INTERWEAVING_PROGRAM,
    gen_buildup_stream,
    gen_dense_shuffled,
    gen_interweaving,
    gen_probe_pair,
)
from .metrics import Cell, ExperimentSpec, MetricsRow, run_benchmark

EXPERIMENT_NAMES = ("probe", "bulkload", "interweaving", "buildup", "corpus")

INDEXED_COMBOS = tuple((a, d)
                       for a in ("CI", "UKI", "UPI")
                       for d in ("SA", "BP", "HT", "RX"))
ALL_COMBOS = INDEXED_COMBOS + (("FS", "RS"),)

_REFERENCE_BYTES = 100 * 2**20

PROBE_PROGRAM = """\
% One probing relation against one probed-into relation, joined on an
% attribute the probe side delivers in no useful order.
.decl r/2 .edb
.decl s/2 .edb
.decl out/2 .idb

out(a, c) :- r(a, b), s(b, c).
"""

BULKLOAD_PROGRAM = """\
% Load-only workload: one wide fact file, no rules.
.decl r/2 .edb
"""


def auto_configuration(program, facts, space_budget=None):
    """Profile, select, and return (EvalConfig, SelectionResult)."""
    prof = profile_run(program, facts)
    sel = select_configuration(prof, program=program,
                               space_budget=space_budget)
    return sel.to_eval_config(), sel


def build_probe_cells(spec: ExperimentSpec) -> list[Cell]:
    program = parse_program(PROBE_PROGRAM)
    s_bytes = max(64, round(_REFERENCE_BYTES * spec.scale))
    r_bytes = max(32, s_bytes // 5)
    partners = int(spec.params.get("partners", 2))
    r, s = gen_probe_pair(r_bytes, s_bytes, partners, seed=spec.seed)
    facts = {"r": r, "s": s}
    return [Cell(f"{a}-{d}", program, facts, uniform_config(program, a, d))
            for a, d in INDEXED_COMBOS]


def build_bulkload_cells(spec: ExperimentSpec) -> list[Cell]:
    program = parse_program(BULKLOAD_PROGRAM)
    n = max(4, round(_REFERENCE_BYTES * spec.scale / 16))
    facts = {"r": gen_dense_shuffled(n, arity=2, multiplicity=1,
                                     seed=spec.seed)}
    cells = []
    for ds in ("SA", "SAPP", "BP", "HT", "RX"):
        cells.append(Cell(f"CI-{ds}", program, facts,
                          uniform_config(program, "CI", ds)))
    return cells


# Which representation serves each rule's probe into s, per sharing degree.
# Degree 1 collapses everything onto the plain ascending prefix; degree 4
# gives every rule its own exact sort order.
_INTERWEAVING_PINS = {
    1: {0: (0, 1, 2, 3), 1: (0, 1, 2, 3), 2: (0, 1, 2, 3), 3: (0, 1, 2, 3)},
    2: {0: (0, 1, 2, 3), 1: (0, 1, 2, 3), 2: (2, 0, 1), 3: (0, 1, 2, 3)},
    3: {0: (0, 1, 2, 3), 1: (1, 0), 2: (2, 0, 1), 3: (0, 1, 2, 3)},
    4: {0: (0,), 1: (1, 0), 2: (2, 0, 1), 3: (3, 1, 2, 0)},
}


def interweaving_config(share: int, access: str) -> EvalConfig:
    base = {}
    for i in range(1, 5):
        base[f"r{i}"] = [RepConfig("CI", "SA", tuple(range(i)))]
        base[f"out{i}"] = [RepConfig("CI", "SA", (0,))]
    base["s"] = [RepConfig(access, "SA", key)
                 for key in INTERWEAVING_KEYS[share]]
    occurrence_map = {(ri, 1): key
                      for ri, key in _INTERWEAVING_PINS[share].items()}
    return EvalConfig(base=base, occurrence_map=occurrence_map)


def build_interweaving_cells(spec: ExperimentSpec) -> list[Cell]:
    program = parse_program(INTERWEAVING_PROGRAM)
    multiplicity = int(spec.params.get("multiplicity", 4))
    facts = gen_interweaving(multiplicity, seed=spec.seed, scale=spec.scale)
    cells = []
    for access in ("CI", "UPI"):
        for share in (1, 2, 3, 4):
            cells.append(Cell(f"{access}-share{share}", program, facts,
                              interweaving_config(share, access)))
    return cells


_BUILDUP_SHAPES = (
    ("new-ordered", dict(new_fraction=1.0, dup_multiplicity=1, ordered=True)),
    ("new-shuffled", dict(new_fraction=1.0, dup_multiplicity=1,
                          ordered=False)),
    ("contained", dict(new_fraction=0.0, dup_multiplicity=1, ordered=False)),
    ("dup100", dict(new_fraction=1.0, dup_multiplicity=100, ordered=False)),
)


def _buildup_once(ds: str, strategy: str, base, stream):
    """One build-up pass: seed a base relation, offer the stream through the
    strategy, merge. Returns (counters, timings dict, final base size)."""
    counters = OpCounters()
    rt = RelationRT("t", 2, counters, 16)
    cfg = [RepConfig("CI", ds, (0, 1))]
    t0 = time.perf_counter()
    rt.setup_base(cfg)
    create_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    rt.bulk_load_base(base)
    rt.setup_delta(cfg)
    bulk_s = time.perf_counter() - t0
    rt.make_new()
    state = make_strategy(strategy, rt)
    t0 = time.perf_counter()
    offer = state.offer
    for t in stream:
        offer(t)
    eval_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    new_count = state.finish()
    rt.rebrand(new_count)
    merge_s = time.perf_counter() - t0
    size = len(list(rt.base_handles[0].rep.iterate()))
    timings = {"create_s": create_s, "bulk_load_s": bulk_s,
               "body_eval_s": eval_s, "merge_s": merge_s,
               "total_s": create_s + bulk_s + eval_s + merge_s}
    return counters, timings, size


def run_buildup(spec: ExperimentSpec) -> list[MetricsRow]:
    """Duplicate-elimination strategies driven directly on synthetic offer
    streams, outside the rule engine, so each axis of the stream shape is
    controlled exactly."""
    from ..errors import CounterMismatchError

    ds = str(spec.params.get("ds", "BP"))
    base_n = max(4, round(_REFERENCE_BYTES * spec.scale / 16))
    rows = []
    for shape_name, kwargs in _BUILDUP_SHAPES:
        base, stream = gen_buildup_stream(base_n, base_n, seed=spec.seed,
                                          **kwargs)
        for strategy in STRATEGIES:
            timings_list = []
            first_counts = None
            size = 0
            for rep in range(max(1, spec.repetitions)):
                counters, timings, size = _buildup_once(ds, strategy, base,
                                                        stream)
                counts = counters.as_dict()
                if first_counts is None:
                    first_counters, first_counts = counters, counts
                elif counts != first_counts:
                    raise CounterMismatchError(
                        f"buildup {ds}-{strategy}-{shape_name}: repetition "
                        f"{rep + 1} produced different operation counters")
                timings_list.append(timings)
            n = len(timings_list)
            avg = {k: sum(t[k] for t in timings_list) / n
                   for k in timings_list[0]}
            totals = {k: 0 for k in ("bulk_load_tuples", "iterate_calls",
                                     "iterate_returned", "probe_calls",
                                     "probe_returned", "contains_calls",
                                     "append_calls", "remove_calls")}
            for counts in first_counters.reps.values():
                for k in totals:
                    totals[k] += getattr(counts, k)
            rows.append(MetricsRow(
                experiment=spec.name, config=f"{ds}-{strategy}-{shape_name}",
                repetitions=n, **avg, **totals,
                cardinalities=f"t={size}"))
    return rows


def build_corpus_cells(spec: ExperimentSpec) -> list[Cell]:
    """Every corpus workload under the automatic configuration and the
    indexed uniform grid."""
    only = spec.params.get("workload")
    names = [only] if only else list(CORPUS_NAMES)
    cells = []
    for name in names:
        program = parse_program(corpus_program_text(name))
        facts = desk_facts(name, scale=spec.scale, seed=spec.seed)
        config, _ = auto_configuration(program, facts)
        cells.append(Cell(f"{name}/auto", program, facts, config))
        for a, d in INDEXED_COMBOS:
            cells.append(Cell(f"{name}/{a}-{d}", program, facts,
                              uniform_config(program, a, d)))
    return cells


def run_experiment(spec: ExperimentSpec, runner=None) -> list[MetricsRow]:
    if spec.name == "probe":
        cells = build_probe_cells(spec)
    elif spec.name == "bulkload":
        cells = build_bulkload_cells(spec)
    elif spec.name == "interweaving":
        cells = build_interweaving_cells(spec)
    elif spec.name == "buildup":
        return run_buildup(spec)
    elif spec.name == "corpus":
        cells = build_corpus_cells(spec)
    else:
        raise ValueError(f"unknown experiment {spec.name!r}; "
                         f"choose from {', '.join(EXPERIMENT_NAMES)}")
    return run_benchmark(spec.name, cells, repetitions=spec.repetitions,
                         runner=runner or run_program)
