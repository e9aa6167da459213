"""Benchmark cells, metrics rows, and CSV emission.

A cell is one (program, facts, configuration) combination. The runner
executes each cell `repetitions` times, averages wall-clock phase timings,
and insists the operation counters agree bit-for-bit across repetitions:
they are pure functions of the cell, so any disagreement is a
nondeterminism bug and aborts the whole run. Evaluation errors, by
contrast, produce an error row and the grid moves on.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields

from ..engine import run_program
from ..engine.config import EvalConfig
from ..errors import CounterMismatchError, FlexdlError, IoError
from ..frontend import Program

CSV_HEADER = (
    "experiment", "config", "repetitions",
    "create_s", "bulk_load_s", "body_eval_s", "merge_s", "total_s",
    "bulk_load_tuples", "iterate_calls", "iterate_returned",
    "probe_calls", "probe_returned", "contains_calls", "append_calls",
    "remove_calls", "footprint_bytes", "cardinalities", "iterations",
    "error",
)

_FLOAT_FIELDS = {"create_s", "bulk_load_s", "body_eval_s", "merge_s",
                 "total_s"}
_INT_FIELDS = {"repetitions", "bulk_load_tuples", "iterate_calls",
               "iterate_returned", "probe_calls", "probe_returned",
               "contains_calls", "append_calls", "remove_calls",
               "footprint_bytes"}


@dataclass
class Cell:
    cell_id: str
    program: Program
    facts: dict[str, list[tuple[int, ...]]]
    config: EvalConfig


@dataclass
class ExperimentSpec:
    name: str
    scale: float = 0.01
    seed: int = 0
    repetitions: int = 3
    params: dict = field(default_factory=dict)


@dataclass
class MetricsRow:
    experiment: str
    config: str
    repetitions: int = 0
    create_s: float = 0.0
    bulk_load_s: float = 0.0
    body_eval_s: float = 0.0
    merge_s: float = 0.0
    total_s: float = 0.0
    bulk_load_tuples: int = 0
    iterate_calls: int = 0
    iterate_returned: int = 0
    probe_calls: int = 0
    probe_returned: int = 0
    contains_calls: int = 0
    append_calls: int = 0
    remove_calls: int = 0
    footprint_bytes: int = 0
    cardinalities: str = ""
    iterations: str = ""
    error: str = ""


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def row_from_run(experiment: str, config_id: str, repetitions: int,
                 timings_list, result) -> MetricsRow:
    """Aggregate a cell's repetitions into one row.

    `result` is the RunResult of the first repetition (counters are
    identical across repetitions by contract)."""
    n = len(timings_list)
    avg = {f: sum(getattr(t, f) for t in timings_list) / n
           for f in ("create_s", "bulk_load_s", "body_eval_s", "merge_s",
                     "total_s")}
    totals = {"bulk_load_tuples": 0, "iterate_calls": 0,
              "iterate_returned": 0, "probe_calls": 0, "probe_returned": 0,
              "contains_calls": 0, "append_calls": 0, "remove_calls": 0}
    for counts in result.counters.reps.values():
        for k in totals:
            totals[k] += getattr(counts, k)
    cards = result.cardinalities()
    return MetricsRow(
        experiment=experiment,
        config=config_id,
        repetitions=n,
        **avg,
        **totals,
        footprint_bytes=sum(result.footprints.values()),
        cardinalities=";".join(f"{k}={v}" for k, v in sorted(cards.items())),
        iterations="|".join(str(i) for i in
                            result.counters.strata_iterations),
    )


def run_benchmark(experiment: str, cells: list[Cell], repetitions: int = 3,
                  runner=None) -> list[MetricsRow]:
    """Execute every cell; one aggregated row per cell.

    `runner(program, facts, config)` defaults to the engine entry point and
    exists so tests can substitute a deterministic or faulty stand-in.
    """
    if runner is None:
        runner = run_program
    rows: list[MetricsRow] = []
    for cell in cells:
        timings = []
        first = None
        first_counters = None
        error = None
        for rep in range(max(1, repetitions)):
            try:
                result = runner(cell.program, cell.facts, cell.config)
            except CounterMismatchError:
                raise
            except FlexdlError as e:
                error = f"{type(e).__name__}: {e}"
                break
            counters = result.counters.as_dict()
            if first is None:
                first, first_counters = result, counters
            elif counters != first_counters:
                raise CounterMismatchError(
                    f"cell {cell.cell_id}: repetition {rep + 1} produced "
                    "different operation counters")
            timings.append(result.timings)
        if error is not None:
            rows.append(MetricsRow(experiment=experiment,
                                   config=cell.cell_id, error=error))
        else:
            rows.append(row_from_run(experiment, cell.cell_id,
                                     len(timings), timings, first))
    return rows


def emit_csv(rows: list[MetricsRow], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow([_fmt(getattr(row, f)) for f in CSV_HEADER])
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def load_csv(path: str) -> list[MetricsRow]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader, ()))
            if header != CSV_HEADER:
                raise IoError(f"unexpected CSV header in {path}")
            rows = []
            for rec in reader:
                kwargs = {}
                for name, value in zip(CSV_HEADER, rec):
                    if name in _FLOAT_FIELDS:
                        kwargs[name] = float(value)
                    elif name in _INT_FIELDS:
                        kwargs[name] = int(value)
                    else:
                        kwargs[name] = value
                rows.append(MetricsRow(**kwargs))
            return rows
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e


assert set(CSV_HEADER) == {f.name for f in fields(MetricsRow)}
