"""Semi-naive evaluation driver.

Relations are evaluated stratum by stratum. Within a recursive stratum each
pass derives candidate facts once per rule variant (one variant per recursive
body occurrence, reading the delta at that occurrence and the accumulated
relation elsewhere), feeds them through the configured duplicate-elimination
strategy, and rebrands the freshly built relation as the next delta. The loop
counter counts condition evaluations, so a stratum whose delta starts empty
still records one iteration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..errors import MissingFactsError
from ..frontend import Program, stratify
from ..storage import RowStore, create, render_key
from . import analysis
from .config import EvalConfig
from .counters import OpCounters, PhaseTimings
from .plan import RepHandle, execute_plan, plan_rule
from .strategies import SeedSink, make_strategy


def _rep_id(relation: str, role: str, cfg) -> str:
    return f"{relation}[{role}]/{render_key(cfg.key)}:{cfg.access}-{cfg.ds}"


def _make_appender(handles, store):
    if store is None:
        if len(handles) == 1:
            return handles[0].rep.append
        appends = [h.rep.append for h in handles]

        def app(t):
            for a in appends:
                a(t)

        return app
    direct = [h.rep.append for h in handles if h.cfg.access == "CI"]
    with_ref = [h.rep.append_with_ref for h in handles
                if h.cfg.access != "CI"]
    store_append = store.append

    def app(t):
        ref = store_append(t)
        for a in direct:
            a(t)
        for a in with_ref:
            a(t, ref)

    return app


class RelationRT:
    """Runtime state of one relation: its base representations, and during
    recursive evaluation the delta and new groups. Groups containing
    unclustered representations share one row store per group."""

    def __init__(self, name: str, arity: int, counters: OpCounters,
                 node_capacity: int):
        self.name = name
        self.arity = arity
        self.counters = counters
        self.node_capacity = node_capacity
        self.base_handles: list[RepHandle] = []
        self.base_store: RowStore | None = None
        self.delta_cfgs: list = []
        self.delta_handles: list[RepHandle] = []
        self.delta_store: RowStore | None = None
        self.delta_count = 0
        self.new_handles: list[RepHandle] = []
        self.new_store: RowStore | None = None
        self.append_base = None
        self.append_new = None

    def _make_group(self, cfgs, role: str):
        store = (RowStore(self.arity)
                 if any(c.access in ("UKI", "UPI", "FS") for c in cfgs)
                 else None)
        handles = []
        for c in cfgs:
            s = store if c.access in ("UKI", "UPI", "FS") else None
            rep = create(c, self.arity, s, node_capacity=self.node_capacity)
            rid = _rep_id(self.name, role, c)
            handles.append(RepHandle(rep, rid, self.counters.rep(rid), c))
        return handles, store

    def _bulk(self, handles, store, tuples) -> None:
        if store is not None:
            refs = store.extend(tuples)
            pairs = list(zip(tuples, refs))
        for h in handles:
            if h.cfg.access == "CI":
                h.rep.bulk_load(tuples)
            else:
                h.rep.bulk_load_refs(pairs)
            h.counts.bulk_load_tuples += len(tuples)

    def setup_base(self, cfgs) -> None:
        self.base_handles, self.base_store = self._make_group(cfgs, "base")
        self.append_base = _make_appender(self.base_handles, self.base_store)

    def bulk_load_base(self, tuples) -> None:
        self._bulk(self.base_handles, self.base_store, list(tuples))

    def setup_delta(self, cfgs) -> None:
        """Seed the delta with the deduplicated base contents."""
        self.delta_cfgs = list(cfgs)
        self.delta_handles, self.delta_store = self._make_group(cfgs, "delta")
        seed = list(dict.fromkeys(self.base_handles[0].rep.iterate()))
        h0 = self.base_handles[0]
        h0.counts.iterate_calls += 1
        h0.counts.iterate_returned += len(seed)
        self._bulk(self.delta_handles, self.delta_store, seed)
        self.delta_count = len(seed)

    def make_new(self) -> None:
        self.new_handles, self.new_store = self._make_group(self.delta_cfgs,
                                                            "new")
        self.append_new = _make_appender(self.new_handles, self.new_store)

    def finished_append_base(self) -> None:
        for h in self.base_handles:
            h.rep.finished_append()

    def finished_append_new(self) -> None:
        for h in self.new_handles:
            h.rep.finished_append()

    def rebrand(self, new_count: int) -> None:
        """The new group becomes the next delta; counters keep accruing under
        the delta identity from here on."""
        self.delta_handles = [
            RepHandle(h.rep, _rep_id(self.name, "delta", h.cfg),
                      self.counters.rep(_rep_id(self.name, "delta", h.cfg)),
                      h.cfg)
            for h in self.new_handles
        ]
        self.delta_store = self.new_store
        self.delta_count = new_count
        self.new_handles = []
        self.new_store = None
        self.append_new = None

    def handle_for(self, role: str, cfg) -> RepHandle:
        groups = {"base": self.base_handles, "edb": self.base_handles,
                  "delta": self.delta_handles, "new": self.new_handles}
        for h in groups[role]:
            if h.cfg == cfg:
                return h
        raise KeyError(f"{self.name}: no {role} representation {cfg}")


@dataclass
class RunResult:
    results: dict[str, list[tuple]]
    counters: OpCounters
    timings: PhaseTimings
    footprints: dict[str, int] = field(default_factory=dict)

    def cardinalities(self) -> dict[str, int]:
        return {name: len(rows) for name, rows in self.results.items()}

    def result_sets(self) -> dict[str, frozenset]:
        return {name: frozenset(rows) for name, rows in self.results.items()}


def run_program(program: Program, facts: dict[str, list], config: EvalConfig,
                strata=None) -> RunResult:
    """Evaluate `program` over `facts` under `config`. facts maps relation
    names to tuple lists; every EDB relation must be present (empty lists are
    fine), IDB entries are optional initial facts and are deduplicated.
    Results hold the final contents of every IDB relation."""
    t_start = time.perf_counter()
    if strata is None:
        strata = stratify(program)
    config.validate(program, strata)
    counters = OpCounters()
    timings = PhaseTimings()

    for name in program.edb_relations():
        if name not in facts:
            raise MissingFactsError(f"no facts supplied for EDB relation {name!r}")

    t0 = time.perf_counter()
    rts: dict[str, RelationRT] = {}
    for name in program.declarations:
        rt = RelationRT(name, program.arity(name), counters,
                        config.node_capacity)
        rt.setup_base(config.base[name])
        rts[name] = rt
    timings.create_s += time.perf_counter() - t0

    t0 = time.perf_counter()
    for name, rt in rts.items():
        if program.is_edb(name):
            rt.bulk_load_base(facts[name])
        else:
            initial = facts.get(name, [])
            rt.bulk_load_base(list(dict.fromkeys(initial)))
    timings.bulk_load_s += time.perf_counter() - t0

    def lookup(relation, role, repcfg):
        return rts[relation].handle_for(role, repcfg)

    for stratum in strata:
        # Non-recursive rules run once, feeding base directly.
        for ri in stratum.seed_rules:
            plan = plan_rule(program, stratum.relations, ri, None, config,
                             lookup)
            sink = SeedSink(rts[plan.head_relation])
            t0 = time.perf_counter()
            execute_plan(plan, sink.offer, counters)
            cb0, ab0 = sink.cb, sink.ab
            sink.finish()
            counters.add_occ((ri, "head", "contains", "base"), cb0)
            counters.add_occ((ri, "head", "append", "base"), ab0)
            timings.body_eval_s += time.perf_counter() - t0

        if not stratum.recursive_rules:
            counters.strata_iterations.append(0)
            continue

        stratum_rels = sorted(r for r in stratum.relations
                              if not program.is_edb(r))
        t0 = time.perf_counter()
        for rel in stratum_rels:
            rts[rel].setup_delta(config.delta[rel])
        timings.bulk_load_s += time.perf_counter() - t0

        variants = []
        for ri in stratum.recursive_rules:
            rule = program.rules[ri]
            for occ in analysis.recursive_occurrences(rule, stratum.relations):
                variants.append((ri, occ))

        iterations = 0
        while True:
            iterations += 1
            if all(rts[rel].delta_count == 0 for rel in stratum_rels):
                break
            for rel in stratum_rels:
                rts[rel].make_new()
            states = {rel: make_strategy(config.strategy, rts[rel])
                      for rel in stratum_rels}

            t0 = time.perf_counter()
            for ri, occ in variants:
                plan = plan_rule(program, stratum.relations, ri, occ, config,
                                 lookup)
                state = states[plan.head_relation]
                cb0, cn0, an0, ab0 = state.cb, state.cn, state.an, state.ab
                execute_plan(plan, state.offer, counters)
                counters.add_occ((ri, "head", "contains", "base"),
                                 state.cb - cb0)
                counters.add_occ((ri, "head", "contains", "new"),
                                 state.cn - cn0)
                counters.add_occ((ri, "head", "append", "new"),
                                 state.an - an0)
                counters.add_occ((ri, "head", "append", "base"),
                                 state.ab - ab0)
            timings.body_eval_s += time.perf_counter() - t0

            t0 = time.perf_counter()
            for rel in stratum_rels:
                new_count = states[rel].finish()
                rts[rel].rebrand(new_count)
            timings.merge_s += time.perf_counter() - t0
        counters.strata_iterations.append(iterations)

    results = {}
    for name in program.idb_relations():
        results[name] = list(rts[name].base_handles[0].rep.iterate())

    footprints: dict[str, int] = {}
    for name, rt in rts.items():
        for h in rt.base_handles:
            footprints[h.rep_id] = h.rep.memory_footprint()
        if rt.base_store is not None:
            footprints[f"{name}[base]:store"] = rt.base_store.memory_footprint()
        for h in rt.delta_handles:
            footprints[h.rep_id] = h.rep.memory_footprint()
        if rt.delta_store is not None:
            footprints[f"{name}[delta]:store"] = rt.delta_store.memory_footprint()

    timings.total_s = time.perf_counter() - t_start
    return RunResult(results, counters, timings, footprints)
