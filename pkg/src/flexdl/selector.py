"""Configuration selection from a profile.

Index keys come first: per rule, each attribute of the driving occurrence is a
candidate sort order; the candidate whose alignment path carries the most
operations wins, and the driving occurrence's key becomes the delivered
prefix matched by the heaviest edge on that path. Downstream occurrences keep
their canonical (delivery-ordered) keys.

Three decision passes then fill in the physical design:

1. data structures: driving occurrences get append-free arrays, aligned
   probe targets get trees when appends interleave (arrays otherwise),
   never-aligned probe targets get hash tables, and the accumulated head
   relation gets a hash table unless arrivals are fully aligned;
2. access types: clustered by default, key-only unclustered when the key is
   much narrower than the schema and the probes are unordered, pointer-based
   unclustered only under a space budget;
3. sharing: hash keys are always exclusive; ordered keys stay exclusive when
   probe multiplicity is low or evaluation dominates loading, and collapse
   into a prefix-chain key otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import analysis
from .engine.analysis import chain_key, min_chain_cover
from .engine.config import EvalConfig
from .frontend import Program, Var, parse_program, stratify
from .profiler import FULL, NEVER, AlignmentGraph, ProfileResult
from .storage import RepConfig, render_key


@dataclass(frozen=True)
class SelectorPolicy:
    """Thresholds feeding the decision passes; kept in one place so they can
    be tuned without touching the tree logic."""

    duplicate_ratio_s2: float = 2.0     # offers per distinct tuple -> S2
    new_ratio_s3: float = 0.5           # fraction of offers that are new -> S3
    multiplicity_share: float = 2.0     # probe returned/calls above this -> share
    uki_half_width: int = 2             # need 2*key_width <= schema_width
    uki_min_saving: int = 2             # and schema_width - key_width >= this
    budget_wide_arity: int = 3          # UPI conversion needs arity >= this


DEFAULT_POLICY = SelectorPolicy()


@dataclass
class RulePartition:
    """How one rule's occurrences split under its winning candidate."""

    rule_idx: int
    candidate: int
    b0_key: tuple[int, ...]
    aligned: list[int]
    never: list[int]
    head_alignment: str | None
    path_sum: int


@dataclass
class SelectionResult:
    base: dict[str, list[RepConfig]]
    delta: dict[str, list[RepConfig]]
    strategy: str | None
    occurrence_map: dict[tuple[int, int], tuple[int, ...]]
    partitions: list[RulePartition]
    rationale: list[str] = field(default_factory=list)

    def to_eval_config(self, node_capacity: int = 16) -> EvalConfig:
        return EvalConfig(
            base={k: list(v) for k, v in self.base.items()},
            delta={k: list(v) for k, v in self.delta.items()},
            new={k: list(v) for k, v in self.delta.items()},
            strategy=self.strategy or "S1",
            occurrence_map=dict(self.occurrence_map),
            node_capacity=node_capacity,
        )

    def config_text(self, program: Program) -> str:
        from .configfile import render_config
        return render_config(self, program)


def _delivered_positions(atom, candidate: int) -> list[tuple[str, int]]:
    """(variable, position) pairs in delivered order for a candidate."""
    out = []
    seen = set()
    for p in [candidate] + [q for q in range(len(atom.args)) if q != candidate]:
        term = atom.args[p]
        if isinstance(term, Var) and term.name not in seen:
            seen.add(term.name)
            out.append((term.name, p))
    return out


def _lcp_len(seq, delivered) -> int:
    n = 0
    for a, b in zip(seq, delivered):
        if a != b:
            break
        n += 1
    return n


def _pick_candidate(graphs: list[AlignmentGraph]) -> AlignmentGraph:
    """Heaviest delivery path wins; ties go to the lower attribute index.

    The path of a candidate is the set of edges that start from its
    delivery order (nonempty shared prefix), so two candidates never claim
    the same operations.
    """
    return sorted(graphs, key=lambda g: (-g.path_sum(), g.candidate))[0]


def _b0_key(program: Program, graph: AlignmentGraph) -> tuple[int, ...]:
    """Delivered prefix matched by the heaviest on-path edge."""
    rule = program.rules[graph.rule_idx]
    b0 = rule.body[0]
    on_path = [e for e in graph.edges if e.on_path]
    if not on_path:
        return (graph.candidate,)
    best = sorted(on_path,
                  key=lambda e: (-e.calls, -_lcp_len(e.seq, graph.delivered),
                                 str(e.occ)))[0]
    matched = _lcp_len(best.seq, graph.delivered)
    positions = _delivered_positions(b0, graph.candidate)
    return tuple(p for _, p in positions[:max(1, matched)])


class _RelationDemands:
    """Accumulated duties one relation must serve across all rules."""

    def __init__(self, name: str, arity: int, is_edb: bool):
        self.name = name
        self.arity = arity
        self.is_edb = is_edb
        self.b0_keys: list[tuple[int, ...]] = []
        self.delta_b0_keys: list[tuple[int, ...]] = []
        # base-role probes: key -> {"classes": set, "occs": [(rule, occ)]}
        self.probes: dict[tuple[int, ...], dict] = {}
        self.delta_probes: dict[tuple[int, ...], dict] = {}
        self.head_classes: list[str] = []
        self.probe_calls = 0
        self.probe_returned = 0
        self.contains_calls = 0
        self.bulk_tuples = 0

    def add_probe(self, key, cls, rule_idx, occ, role, calls, returned):
        target = self.delta_probes if role == "delta" else self.probes
        slot = target.setdefault(key, {"classes": set(), "occs": []})
        slot["classes"].add(cls)
        if role != "delta":
            slot["occs"].append((rule_idx, occ))
        self.probe_calls += calls
        self.probe_returned += returned

    def multiplicity(self) -> float:
        if self.probe_calls == 0:
            return 0.0
        return self.probe_returned / self.probe_calls

    def eval_dominates(self) -> bool:
        return (self.probe_calls + self.contains_calls) > self.bulk_tuples


def select_configuration(profile: ProfileResult, program: Program | None = None,
                         space_budget: int | None = None,
                         policy: SelectorPolicy = DEFAULT_POLICY) -> SelectionResult:
    if program is None:
        program = parse_program(profile.program_text)
    strata = stratify(program)
    recursive_rels: set[str] = set()
    stratum_of_rule: dict[int, frozenset] = {}
    for stratum in strata:
        for ri in stratum.seed_rules:
            stratum_of_rule[ri] = frozenset()
        for ri in stratum.recursive_rules:
            stratum_of_rule[ri] = stratum.relations
        if stratum.recursive_rules:
            recursive_rels.update(stratum.relations)

    rationale: list[str] = []
    demands = {
        name: _RelationDemands(name, program.arity(name), program.is_edb(name))
        for name in program.declarations
    }
    for name in program.declarations:
        demands[name].bulk_tuples = profile.signature.relation(name).size

    # --- index keys -------------------------------------------------------
    partitions: list[RulePartition] = []
    winners: dict[int, AlignmentGraph] = {}
    for ri, rule in enumerate(program.rules):
        graphs = profile.graphs_for_rule(ri)
        if not graphs:
            continue
        win = _pick_candidate(graphs)
        winners[ri] = win
        sums = {g.candidate: g.path_sum() for g in graphs}
        rationale.append(
            f"rule {ri}: candidate {win.candidate} wins path sums {sums}")
        b0_key = _b0_key(program, win)
        b0_rel = rule.body[0].relation
        b0_role = "delta" if (b0_rel in stratum_of_rule[ri]
                              and not program.is_edb(b0_rel)) else "base"
        aligned: list[int] = []
        never: list[int] = []
        head_cls = None
        for e in win.edges:
            if e.op == "probe":
                key, _ = _canonical_key(program, ri, e.occ)
                if e.alignment == NEVER:
                    never.append(e.occ)
                else:
                    aligned.append(e.occ)
                demands[e.relation].add_probe(key, e.alignment, ri, e.occ,
                                              e.role, e.calls, e.returned)
            elif e.op == "contains" and e.role == "base":
                head_cls = e.alignment
                demands[e.relation].head_classes.append(e.alignment or NEVER)
                demands[e.relation].contains_calls += e.calls
        if b0_role == "base":
            demands[b0_rel].b0_keys.append(b0_key)
        else:
            # The delta drives the loop; its sort key is folded into the
            # joint delta/new choice below without counting as a probe.
            demands[b0_rel].delta_b0_keys.append(b0_key)
        aligned = sorted(set(aligned))
        never = sorted(set(never))
        partitions.append(RulePartition(ri, win.candidate, b0_key, aligned,
                                        never, head_cls, win.path_sum()))
        rationale.append(
            f"rule {ri}: B0 {b0_rel} key {render_key(b0_key)}; "
            f"aligned occurrences {aligned}, never-aligned {never}")

    # --- strategy stats ---------------------------------------------------
    new_ratio: dict[str, float] = {}
    dup_ratio: dict[str, float] = {}
    for st in profile.signature.strategy:
        new_ratio[st.relation] = st.new_ratio
        dup_ratio[st.relation] = st.duplicate_ratio

    base: dict[str, list[RepConfig]] = {}
    delta: dict[str, list[RepConfig]] = {}
    occurrence_map: dict[tuple[int, int], tuple[int, ...]] = {}

    for name in program.declarations:
        d = demands[name]
        reps: list[tuple[tuple[int, ...], str, dict]] = []  # (key, ds, meta)
        recursive = name in recursive_rels

        # Head of an IDB relation: contains target, full-tuple key.
        if not d.is_edb:
            full_key = tuple(range(d.arity))
            arrivals_full = bool(d.head_classes) and all(
                c == FULL for c in d.head_classes)
            if arrivals_full:
                ds = "SAPP" if new_ratio.get(name, 0.0) >= policy.new_ratio_s3 else "BP"
                rationale.append(
                    f"{name}: head arrivals fully aligned -> {ds}")
            else:
                ds = "HT"
                rationale.append(
                    f"{name}: head arrivals not fully aligned -> HT")
            reps.append((full_key, ds, {"probes_unordered": ds == "HT",
                                        "head": True}))

        # Probe-serving representations (base role).
        ordered_keys: list[tuple[tuple[int, ...], dict]] = []
        for key, info in d.probes.items():
            if NEVER in info["classes"]:
                reps.append((key, "HT", {"probes_unordered": True,
                                         "occs": info["occs"]}))
                rationale.append(
                    f"{name}: never-aligned probes on {render_key(key)} -> HT")
            else:
                ordered_keys.append((key, info))

        # Sharing pass over the ordered probe keys.
        if ordered_keys:
            exclusive_ok = (d.multiplicity() <= policy.multiplicity_share
                            or d.eval_dominates())
            ds = "BP" if recursive else "SA"
            if exclusive_ok:
                for key, info in ordered_keys:
                    reps.append((key, ds, {"probes_unordered": False,
                                           "occs": info["occs"]}))
                rationale.append(
                    f"{name}: ordered probe keys kept exclusive "
                    f"(multiplicity {d.multiplicity():.2f})")
            else:
                chains = min_chain_cover([frozenset(k) for k, _ in ordered_keys])
                for chain in chains:
                    union = frozenset().union(*chain)
                    ck = tuple(a for a in chain_key(chain, d.arity)
                               if a in union)
                    occs = []
                    for key, info in ordered_keys:
                        if frozenset(key) in chain:
                            occs.extend(info["occs"])
                    reps.append((ck, ds, {"probes_unordered": False,
                                          "occs": occs}))
                rationale.append(
                    f"{name}: ordered probe keys shared via prefix chains "
                    f"(multiplicity {d.multiplicity():.2f})")

        # Driving-occurrence keys not already covered by an ordered rep.
        for key in d.b0_keys:
            covered = any(_ordered_ds(ds) and _is_prefix_of(key, k)
                          for k, ds, _ in reps)
            if not covered:
                reps.append((key, "SA", {"probes_unordered": False,
                                         "b0": True}))
                rationale.append(
                    f"{name}: driving occurrence -> SA on {render_key(key)}")

        if not reps:
            reps.append((tuple(range(d.arity)), "SA",
                         {"probes_unordered": False}))
            rationale.append(f"{name}: unreferenced -> SA full key")

        # Deduplicate identical keys (hash duties win, then tree, then
        # deferred array, then array).
        reps = _merge_same_key(reps)

        base[name] = [RepConfig("CI", ds, key) for key, ds, _ in reps]

        for key, ds, meta in reps:
            for rule_occ in meta.get("occs", ()):
                occurrence_map[rule_occ] = key

        # Joint delta/new configuration. A probed delta takes a tree: its
        # prefix can serve every binding pattern while the pair keeps
        # absorbing appends and dedup lookups. Unprobed deltas follow the
        # arrival pattern instead.
        if recursive:
            sort_sets = [frozenset(k) for k in d.delta_probes]
            sort_sets += [frozenset(k) for k in d.delta_b0_keys]
            if sort_sets:
                chains = min_chain_cover(sorted(set(sort_sets), key=sorted))
                keys = [chain_key(chain, d.arity) for chain in chains]
            else:
                keys = [tuple(range(d.arity))]
            if d.delta_probes:
                dds = "BP"
                rationale.append(
                    f"{name}: delta/new probed during evaluation -> BP")
            else:
                nr = new_ratio.get(name, 0.0)
                arrivals_full = bool(d.head_classes) and all(
                    c == FULL for c in d.head_classes)
                if arrivals_full:
                    dds = "SAPP" if nr >= policy.new_ratio_s3 else "BP"
                else:
                    dds = "SAPP" if nr >= policy.new_ratio_s3 else "HT"
                rationale.append(
                    f"{name}: delta/new arrival-driven -> {dds} "
                    f"(new ratio {nr:.2f})")
            delta[name] = [RepConfig("CI", dds, k) for k in keys]

    # --- access types -----------------------------------------------------
    sizes = {name: profile.signature.relation(name).size
             for name in program.declarations}
    for name, cfgs in base.items():
        d = demands[name]
        sw = d.arity
        out = []
        for i, cfg in enumerate(cfgs):
            kw = len(cfg.key)
            meta_unordered = cfg.ds == "HT" and any(
                info["occs"] for key, info in d.probes.items()
                if key == cfg.key)
            if (meta_unordered and policy.uki_half_width * kw <= sw
                    and sw - kw >= policy.uki_min_saving):
                out.append(RepConfig("UKI", cfg.ds, cfg.key))
                rationale.append(
                    f"{name}: key {render_key(cfg.key)} much narrower than "
                    f"schema ({kw}/{sw}) with unordered probes -> UKI")
            else:
                out.append(cfg)
        base[name] = out

    if space_budget is not None:
        arities = {name: program.arity(name) for name in program.declarations}
        _apply_space_budget(base, sizes, arities, space_budget, policy,
                            rationale)

    # --- strategy ---------------------------------------------------------
    strategy: str | None = None
    if recursive_rels:
        strategy = "S1"
        worst_dup = max((dup_ratio.get(r, 0.0) for r in recursive_rels),
                        default=0.0)
        never_arrival = any(
            c == NEVER for r in recursive_rels
            for c in demands[r].head_classes)
        high_new = max((new_ratio.get(r, 0.0) for r in recursive_rels),
                       default=0.0)
        # Swapping the check order only pays while the fresh-side lookup is
        # no dearer than the accumulated-side one; a hash base paired with an
        # ordered fresh structure inverts the saving.
        swap_pays = all(
            delta[r][0].ds == "HT" or base[r][0].ds != "HT"
            for r in recursive_rels if r in delta)
        if high_new > policy.new_ratio_s3 and never_arrival:
            strategy = "S3"
            rationale.append(
                f"strategy: new ratio {high_new:.2f} with never-aligned "
                "arrival -> S3")
        elif worst_dup > policy.duplicate_ratio_s2 and swap_pays:
            strategy = "S2"
            rationale.append(
                f"strategy: duplicate ratio {worst_dup:.2f} -> S2")
        elif worst_dup > policy.duplicate_ratio_s2:
            rationale.append(
                f"strategy: duplicate ratio {worst_dup:.2f} but the fresh "
                "side checks through an ordered structure -> S1")
        else:
            rationale.append("strategy: default S1")

    return SelectionResult(base=base, delta=delta, strategy=strategy,
                           occurrence_map=occurrence_map,
                           partitions=partitions, rationale=rationale)


def _canonical_key(program: Program, rule_idx: int, occ: int):
    from .profiler import canonical_occurrence
    return canonical_occurrence(program.rules[rule_idx], occ)


def _ordered_ds(ds: str | None) -> bool:
    return ds in ("SA", "SAPP", "BP", "RX")


def _is_prefix_of(short: tuple[int, ...], long: tuple[int, ...]) -> bool:
    return len(short) <= len(long) and long[:len(short)] == tuple(short)


_DS_RANK = {"HT": 0, "BP": 1, "SAPP": 2, "SA": 3, "RX": 4}


def _merge_same_key(reps):
    merged: dict[tuple[int, ...], tuple[str, dict]] = {}
    order: list[tuple[int, ...]] = []
    for key, ds, meta in reps:
        if key not in merged:
            merged[key] = (ds, dict(meta))
            order.append(key)
            continue
        old_ds, old_meta = merged[key]
        win = ds if _DS_RANK[ds] < _DS_RANK[old_ds] else old_ds
        m = dict(old_meta)
        m["probes_unordered"] = (old_meta.get("probes_unordered", False)
                                 or meta.get("probes_unordered", False))
        m["occs"] = list(old_meta.get("occs", [])) + list(meta.get("occs", []))
        merged[key] = (win, m)
    return [(k, merged[k][0], merged[k][1]) for k in order]


def _footprint_estimate(cfgs, size: int, arity: int) -> int:
    total = 0
    has_store = False
    for cfg in cfgs:
        if cfg.access == "CI":
            total += size * 8 * arity
        else:
            total += size * 8
            has_store = True
    if has_store:
        total += size * 8 * arity
    return total


def _apply_space_budget(base, sizes, arities, budget, policy, rationale):
    # Relations with several representations and a wide schema save the most
    # from switching to pointer-based indexes over one shared store.
    candidates = []
    for name, cfgs in base.items():
        arity = arities.get(name, 1)
        if len(cfgs) >= 2 and arity >= policy.budget_wide_arity:
            saving = sizes.get(name, 0) * 8 * arity * (len(cfgs) - 1)
            candidates.append((-saving, name))
    est = sum(_footprint_estimate(cfgs, sizes.get(name, 0),
                                  arities.get(name, 1))
              for name, cfgs in base.items())
    for _, name in sorted(candidates):
        if est <= budget:
            break
        cfgs = base[name]
        arity = arities.get(name, 1)
        before = _footprint_estimate(cfgs, sizes.get(name, 0), arity)
        base[name] = [RepConfig("UPI", c.ds, c.key) for c in cfgs]
        after = _footprint_estimate(base[name], sizes.get(name, 0), arity)
        est += after - before
        rationale.append(
            f"{name}: space budget -> UPI over a shared store "
            f"(estimate {before} -> {after} bytes)")
