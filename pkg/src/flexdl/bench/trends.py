"""Qualitative performance trend checks.

These compare wall-clock phase timings between configurations, so unlike the
rest of the suite they depend on the machine they run on. The expected
orderings have comfortable margins at the default 1/100 scale on commodity
x86-64 hardware, but a heavily loaded or unusual host can still flip one;
they are kept out of the pure-correctness suites for that reason.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import CORPUS_NAMES
from .experiments import (
    build_bulkload_cells,
    build_corpus_cells,
    build_probe_cells,
)
from .metrics import ExperimentSpec, MetricsRow, run_benchmark

PROBE_MARGIN = 1.2
BULKLOAD_MARGIN = 1.2
AUTO_FACTOR = 1.5


@dataclass
class TrendResult:
    name: str
    passed: bool
    margin: float
    detail: str

    def line(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return f"TREND {self.name}: {state} ({self.detail})"


def _row(rows: list[MetricsRow], config: str) -> MetricsRow:
    for row in rows:
        if row.config == config:
            if row.error:
                raise RuntimeError(f"cell {config} failed: {row.error}")
            return row
    raise KeyError(f"no row for config {config!r}")


def probe_trend(scale: float = 0.01, seed: int = 0, repetitions: int = 3):
    """Hash probes on a clustered index against ordered probes through an
    unclustered one, on a workload whose probe order is useless."""
    spec = ExperimentSpec("probe", scale=scale, seed=seed,
                          repetitions=repetitions)
    cells = [c for c in build_probe_cells(spec)
             if c.cell_id in ("CI-HT", "UPI-BP")]
    rows = run_benchmark("probe", cells, repetitions=repetitions)
    ht = _row(rows, "CI-HT").body_eval_s
    bp = _row(rows, "UPI-BP").body_eval_s
    margin = bp / ht if ht > 0 else float("inf")
    return TrendResult(
        "probe-ht-vs-upi-bp", margin >= PROBE_MARGIN, margin,
        f"body_eval CI-HT {ht:.4f}s vs UPI-BP {bp:.4f}s, "
        f"ratio {margin:.2f} (need >= {PROBE_MARGIN})"), rows


def bulkload_trend(scale: float = 0.01, seed: int = 0, repetitions: int = 3):
    """Sorted-array bulk load against the page, hash, and trie builds."""
    spec = ExperimentSpec("bulkload", scale=scale, seed=seed,
                          repetitions=repetitions)
    rows = run_benchmark("bulkload", build_bulkload_cells(spec),
                         repetitions=repetitions)
    sa = _row(rows, "CI-SA").bulk_load_s
    others = {ds: _row(rows, f"CI-{ds}").bulk_load_s
              for ds in ("BP", "HT", "RX")}
    margin = (min(others.values()) / sa) if sa > 0 else float("inf")
    detail = ", ".join(f"{ds} {t:.4f}s" for ds, t in others.items())
    return TrendResult(
        "bulkload-sa-fastest", margin >= BULKLOAD_MARGIN, margin,
        f"bulk_load SA {sa:.4f}s vs {detail}, "
        f"worst ratio {margin:.2f} (need >= {BULKLOAD_MARGIN})"), rows


def auto_trend(scale: float = 0.01, seed: int = 0, repetitions: int = 3):
    """The selected configuration against the uniform grid on every corpus
    workload: within 1.5x of the grid's best, strictly ahead of uniform
    CI-BP."""
    spec = ExperimentSpec("corpus", scale=scale, seed=seed,
                          repetitions=repetitions)
    rows = run_benchmark("corpus", build_corpus_cells(spec),
                         repetitions=repetitions)
    results = []
    for name in CORPUS_NAMES:
        auto = _row(rows, f"{name}/auto").total_s
        grid = [row for row in rows
                if row.config.startswith(f"{name}/") and
                not row.config.endswith("/auto") and not row.error]
        best = min(row.total_s for row in grid)
        cibp = _row(rows, f"{name}/CI-BP").total_s
        ok = auto <= AUTO_FACTOR * best and auto < cibp
        margin = best / auto if auto > 0 else float("inf")
        results.append(TrendResult(
            f"auto-{name}", ok, margin,
            f"auto {auto:.4f}s, grid best {best:.4f}s "
            f"(factor {auto / best:.2f}, allowed {AUTO_FACTOR}), "
            f"uniform CI-BP {cibp:.4f}s"))
    return results, rows


def run_trends(scale: float = 0.01, seed: int = 0, repetitions: int = 3):
    """All trend checks; returns (results, metrics rows)."""
    all_rows: list[MetricsRow] = []
    results: list[TrendResult] = []
    for fn in (probe_trend, bulkload_trend):
        res, rows = fn(scale=scale, seed=seed, repetitions=repetitions)
        results.append(res)
        all_rows.extend(rows)
    auto_results, rows = auto_trend(scale=scale, seed=seed,
                                    repetitions=repetitions)
    results.extend(auto_results)
    all_rows.extend(rows)
    return results, all_rows
