"""Operation counters: per-representation totals plus per-rule-occurrence
profiles. Counts are logical operation calls and returned tuples, so two
runs over the same inputs and configuration produce identical counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields


@dataclass
class OpCounts:
    bulk_load_tuples: int = 0
    iterate_calls: int = 0
    iterate_returned: int = 0
    probe_calls: int = 0
    probe_returned: int = 0
    contains_calls: int = 0
    append_calls: int = 0
    remove_calls: int = 0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class OpCounters:
    """reps: keyed by representation id (relation[role]/key:ACCESS-DS).
    occ: keyed by (rule index, occurrence label, op, target role); occurrence
    labels are body positions as ints plus "head". strata_iterations counts
    loop-condition evaluations per stratum (productive passes + 1)."""

    reps: dict[str, OpCounts] = field(default_factory=dict)
    occ: dict[tuple, list] = field(default_factory=dict)
    strata_iterations: list[int] = field(default_factory=list)

    def rep(self, rep_id: str) -> OpCounts:
        c = self.reps.get(rep_id)
        if c is None:
            c = self.reps[rep_id] = OpCounts()
        return c

    def add_occ(self, key: tuple, calls: int, returned: int = 0) -> None:
        if calls == 0 and returned == 0:
            return
        slot = self.occ.get(key)
        if slot is None:
            self.occ[key] = [calls, returned]
        else:
            slot[0] += calls
            slot[1] += returned

    def as_dict(self) -> dict:
        return {
            "reps": {k: self.reps[k].as_dict() for k in sorted(self.reps)},
            "occurrences": {
                "|".join(str(p) for p in k): list(v)
                for k, v in sorted(self.occ.items(), key=lambda kv: str(kv[0]))
            },
            "strata_iterations": list(self.strata_iterations),
        }


@dataclass
class PhaseTimings:
    create_s: float = 0.0
    bulk_load_s: float = 0.0
    body_eval_s: float = 0.0
    merge_s: float = 0.0
    total_s: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}
