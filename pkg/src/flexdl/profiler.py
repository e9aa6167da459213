"""Workload profiling: run a program under a neutral baseline configuration,
then condense the operation counters into per-rule alignment graphs and a
workload signature.

An alignment graph is built per (rule, candidate) pair, where a candidate is
one attribute position of the rule's first body occurrence (the occurrence
that drives the join loop). Sorting that occurrence by the candidate attribute
fixes the order in which variable bindings are delivered downstream; every
probe, containment check, and append edge is classified by how its key
sequence relates to that delivered order:

full     the probe's key sequence is a prefix of the delivered sequence, so
         consecutive probes arrive in sorted order;
partial  not full, but the probe key starts with a delivered variable, so
         sorting helps some prefix of it;
never    the probe key starts with a variable the driving occurrence does not
         deliver; its arrival order cannot be influenced from here.

Canonical occurrence keys order an occurrence's bound attribute positions by
when their binding values become available upstream (constants first, then
variables in first-binding order). The signature collects those keys per
relation together with the minimum number of index keys that could serve all
of them via prefix sharing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import analysis
from .engine.analysis import min_chain_cover
from .engine.config import uniform_config
from .engine.run import run_program
from .frontend import Const, Program, Rule, Var, stratify
from .storage import render_key

FULL = "full"
PARTIAL = "partial"
NEVER = "never"


def delivered_sequence(atom, candidate: int) -> tuple[str, ...]:
    """Variable names of `atom` in the order a scan sorted by the candidate
    attribute delivers them: the candidate's variable first, the rest in
    position order. Duplicate variables appear once."""
    out: list[str] = []
    order = [candidate] + [p for p in range(len(atom.args)) if p != candidate]
    for p in order:
        term = atom.args[p]
        if isinstance(term, Var) and term.name not in out:
            out.append(term.name)
    return tuple(out)


def canonical_occurrence(rule: Rule, occ: int) -> tuple[tuple[int, ...], tuple[str, ...]]:
    """(canonical key, probe variable sequence) of a body occurrence: bound
    attribute positions ordered by upstream delivery (constants first, then
    variables in the order they were first bound), and the corresponding
    variable names."""
    slot: dict[str, int] = {}
    for atom in rule.body[:occ]:
        for term in atom.args:
            if isinstance(term, Var) and term.name not in slot:
                slot[term.name] = len(slot)
    atom = rule.body[occ]
    consts = []
    bound_vars = []
    for pos, term in enumerate(atom.args):
        if isinstance(term, Const):
            consts.append(pos)
        elif term.name in slot:
            bound_vars.append((slot[term.name], pos, term.name))
    bound_vars.sort()
    key = tuple(consts) + tuple(pos for _, pos, _ in bound_vars)
    seq = tuple(name for _, _, name in bound_vars)
    return key, seq


def head_sequence(rule: Rule) -> tuple[str, ...]:
    """Variable order in which head facts arrive at the accumulated relation:
    head argument positions ascending."""
    out: list[str] = []
    for term in rule.head.args:
        if isinstance(term, Var) and term.name not in out:
            out.append(term.name)
    return tuple(out)


def classify(seq: tuple[str, ...], delivered: tuple[str, ...]) -> str | None:
    """Alignment class of a probe/contains/append key sequence against the
    delivered variable order."""
    if not seq:
        return None
    if tuple(delivered[:len(seq)]) == tuple(seq):
        return FULL
    if len(seq) > 1 and seq[0] in delivered:
        return PARTIAL
    return NEVER


def on_path(seq: tuple[str, ...], delivered: tuple[str, ...]) -> bool:
    """True when the sequences share a non-empty common prefix, i.e. sorting
    by the candidate changes the arrival order this edge observes."""
    return bool(seq) and bool(delivered) and seq[0] == delivered[0]


@dataclass
class AlignmentEdge:
    src: str | None
    dst: str
    op: str                      # bulk_load | iterate | probe | contains | append
    relation: str
    role: str
    occ: int | str               # body position or "head"
    seq: tuple[str, ...]
    calls: int
    returned: int
    alignment: str | None
    on_path: bool

    def as_dict(self) -> dict:
        return {
            "src": self.src, "dst": self.dst, "op": self.op,
            "relation": self.relation, "role": self.role, "occ": self.occ,
            "seq": list(self.seq), "calls": self.calls,
            "returned": self.returned, "alignment": self.alignment,
            "on_path": self.on_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlignmentEdge":
        return cls(d["src"], d["dst"], d["op"], d["relation"], d["role"],
                   d["occ"], tuple(d["seq"]), d["calls"], d["returned"],
                   d["alignment"], d["on_path"])


@dataclass
class AlignmentGraph:
    rule_idx: int
    candidate: int               # attribute position of the driving occurrence
    b0_relation: str
    delivered: tuple[str, ...]
    recursive: bool
    nodes: list[dict]            # occurrence metadata, head nodes included
    edges: list[AlignmentEdge]

    def path_sum(self) -> int:
        return sum(e.calls for e in self.edges if e.on_path)

    def edges_at(self, occ) -> list[AlignmentEdge]:
        return [e for e in self.edges if e.occ == occ]

    def as_dict(self) -> dict:
        return {
            "rule_idx": self.rule_idx, "candidate": self.candidate,
            "b0_relation": self.b0_relation, "delivered": list(self.delivered),
            "recursive": self.recursive, "nodes": self.nodes,
            "edges": [e.as_dict() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlignmentGraph":
        return cls(d["rule_idx"], d["candidate"], d["b0_relation"],
                   tuple(d["delivered"]), d["recursive"], d["nodes"],
                   [AlignmentEdge.from_dict(e) for e in d["edges"]])


def _occ_roles(program: Program, stratum_relations: frozenset[str],
               rule: Rule, occ: int) -> list[str]:
    """Roles the occurrence plays across delta variants."""
    atom = rule.body[occ]
    if program.is_edb(atom.relation):
        return ["edb"]
    if atom.relation not in stratum_relations:
        return ["base"]
    rec = analysis.recursive_occurrences(rule, stratum_relations)
    if occ in rec:
        return ["delta", "base"] if len(rec) > 1 else ["delta"]
    return ["base"]


def build_alignment_graph(program: Program, stratum_relations: frozenset[str],
                          rule_idx: int, candidate: int, occ_counts: dict,
                          bulk_counts: dict) -> AlignmentGraph:
    """Assemble one graph from the per-occurrence counters of a profiling run.
    occ_counts maps (rule, occ, op, role) -> [calls, returned]; bulk_counts
    maps (relation, role) -> tuples bulk-loaded."""
    rule = program.rules[rule_idx]
    b0 = rule.body[0]
    delivered = delivered_sequence(b0, candidate)
    rec_occs = analysis.recursive_occurrences(rule, stratum_relations)
    recursive = bool(rec_occs)

    def cnt(occ, op, role):
        return occ_counts.get((rule_idx, occ, op, role), (0, 0))

    nodes: list[dict] = []
    edges: list[AlignmentEdge] = []
    for occ, atom in enumerate(rule.body):
        key, seq = canonical_occurrence(rule, occ)
        roles = _occ_roles(program, stratum_relations, rule, occ)
        nodes.append({
            "node": f"occ{occ}", "relation": atom.relation, "occ": occ,
            "roles": roles, "canonical_key": render_key(key),
            "seq": list(seq),
            "depicted": roles[0],
        })
    for role in ("base", "new"):
        if role == "new" and not recursive:
            continue
        nodes.append({"node": f"head_{role}", "relation": rule.head.relation,
                      "occ": "head", "roles": [role],
                      "canonical_key": render_key(
                          tuple(range(rule.head.arity))),
                      "seq": list(head_sequence(rule)), "depicted": role})

    # Driving occurrence: bulk load feeding it, and the iterate edges.
    for role in _occ_roles(program, stratum_relations, rule, 0):
        edges.append(AlignmentEdge(
            None, "occ0", "bulk_load", b0.relation, role, 0, (),
            1 if bulk_counts.get((b0.relation, role)) else 0,
            bulk_counts.get((b0.relation, role), 0), None, False))
        calls, returned = cnt(0, "iterate", role)
        edges.append(AlignmentEdge(
            None, "occ0", "iterate", b0.relation, role, 0, (),
            calls, returned, None, False))

    for occ in range(1, len(rule.body)):
        atom = rule.body[occ]
        _, seq = canonical_occurrence(rule, occ)
        for role in _occ_roles(program, stratum_relations, rule, occ):
            calls, returned = cnt(occ, "probe", role)
            edges.append(AlignmentEdge(
                f"occ{occ - 1}", f"occ{occ}", "probe", atom.relation, role,
                occ, seq, calls, returned, classify(seq, delivered),
                on_path(seq, delivered)))

    hseq = head_sequence(rule)
    head_ops = [("contains", "base"), ("append", "base")]
    if recursive:
        head_ops += [("contains", "new"), ("append", "new")]
    for op, role in head_ops:
        calls, returned = cnt("head", op, role)
        edges.append(AlignmentEdge(
            "occ0", f"head_{role}", op, rule.head.relation, role, "head",
            hseq, calls, returned, classify(hseq, delivered),
            on_path(hseq, delivered)))

    return AlignmentGraph(rule_idx, candidate, b0.relation, delivered,
                          recursive, nodes, edges)


@dataclass
class RelationStats:
    name: str
    is_edb: bool
    arity: int
    size: int
    widest_key_width: int
    distinct_keys: list[str]
    min_shareable_keys: int

    def as_dict(self) -> dict:
        return dict(name=self.name, is_edb=self.is_edb, arity=self.arity,
                    size=self.size, widest_key_width=self.widest_key_width,
                    distinct_keys=list(self.distinct_keys),
                    min_shareable_keys=self.min_shareable_keys)


@dataclass
class StrategyStats:
    relation: str
    offers: int
    new_tuples: int
    duplicate_ratio: float
    new_ratio: float

    def as_dict(self) -> dict:
        return dict(relation=self.relation, offers=self.offers,
                    new_tuples=self.new_tuples,
                    duplicate_ratio=self.duplicate_ratio,
                    new_ratio=self.new_ratio)


@dataclass
class WorkloadSignature:
    relations: list[RelationStats]
    strategy: list[StrategyStats]
    iterations: list[int]

    def relation(self, name: str) -> RelationStats:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def strategy_for(self, name: str) -> StrategyStats | None:
        for s in self.strategy:
            if s.relation == name:
                return s
        return None

    def as_dict(self) -> dict:
        return {
            "relations": [r.as_dict() for r in self.relations],
            "strategy": [s.as_dict() for s in self.strategy],
            "iterations": list(self.iterations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WorkloadSignature":
        return cls([RelationStats(**r) for r in d["relations"]],
                   [StrategyStats(**s) for s in d["strategy"]],
                   list(d["iterations"]))


def compute_signature(program: Program, facts: dict, run) -> WorkloadSignature:
    """Distill relation and duplicate statistics from a finished run."""
    keys_by_rel: dict[str, list[tuple[int, ...]]] = {
        name: [] for name in program.declarations}
    for rule in program.rules:
        for occ in range(len(rule.body)):
            key, _ = canonical_occurrence(rule, occ)
            if key:
                keys_by_rel[rule.body[occ].relation].append(key)

    cards = run.cardinalities()
    relations = []
    for name in program.declarations:
        keys = []
        for k in keys_by_rel[name]:
            if k not in keys:
                keys.append(k)
        sets = [frozenset(k) for k in keys]
        relations.append(RelationStats(
            name=name,
            is_edb=program.is_edb(name),
            arity=program.arity(name),
            size=(len(facts.get(name, [])) if program.is_edb(name)
                  else cards.get(name, 0)),
            widest_key_width=max((len(k) for k in keys), default=0),
            distinct_keys=[render_key(k) for k in sorted(keys)],
            min_shareable_keys=len(min_chain_cover(sets)) if sets else 0,
        ))

    occ = run.counters.occ
    strategy = []
    for name in program.idb_relations():
        offers = 0
        for ri, rule in enumerate(program.rules):
            if rule.head.relation == name:
                offers += occ.get((ri, "head", "contains", "base"), (0, 0))[0]
        size = cards.get(name, 0)
        strategy.append(StrategyStats(
            relation=name,
            offers=offers,
            new_tuples=size,
            duplicate_ratio=offers / size if size else 0.0,
            new_ratio=size / offers if offers else 0.0,
        ))
    return WorkloadSignature(relations, strategy,
                             list(run.counters.strata_iterations))


@dataclass
class ProfileResult:
    program_text: str
    graphs: list[AlignmentGraph]
    signature: WorkloadSignature
    cardinalities: dict[str, int] = field(default_factory=dict)

    def graphs_for_rule(self, rule_idx: int) -> list[AlignmentGraph]:
        return [g for g in self.graphs if g.rule_idx == rule_idx]

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps({
            "program": self.program_text,
            "graphs": [g.as_dict() for g in self.graphs],
            "signature": self.signature.as_dict(),
            "cardinalities": self.cardinalities,
        }, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ProfileResult":
        d = json.loads(text)
        return cls(d["program"],
                   [AlignmentGraph.from_dict(g) for g in d["graphs"]],
                   WorkloadSignature.from_dict(d["signature"]),
                   dict(d["cardinalities"]))


def _bulk_counts(counters) -> dict[tuple[str, str], int]:
    out: dict[tuple[str, str], int] = {}
    for rep_id, counts in counters.reps.items():
        relation, _, rest = rep_id.partition("[")
        role, _, _ = rest.partition("]")
        key = (relation, role)
        out[key] = max(out.get(key, 0), counts.bulk_load_tuples)
    return out


def profile_run(program: Program, facts: dict,
                program_text: str = "") -> ProfileResult:
    """Profile under the neutral baseline: every relation clustered into
    B-trees keyed by the minimal position-ascending chain cover, strategy S1.
    Returns the alignment graphs for every (rule, candidate) pair plus the
    workload signature."""
    strata = stratify(program)
    baseline = uniform_config(program, "CI", "BP", strategy="S1")
    run = run_program(program, facts, baseline, strata=strata)

    stratum_of_rule: dict[int, frozenset[str]] = {}
    for stratum in strata:
        for ri in stratum.seed_rules:
            stratum_of_rule[ri] = frozenset()
        for ri in stratum.recursive_rules:
            stratum_of_rule[ri] = stratum.relations

    bulk = _bulk_counts(run.counters)
    graphs = []
    for ri, rule in enumerate(program.rules):
        b0 = rule.body[0]
        seen = set()
        for pos, term in enumerate(b0.args):
            if not isinstance(term, Var) or term.name in seen:
                continue
            seen.add(term.name)
            graphs.append(build_alignment_graph(
                program, stratum_of_rule[ri], ri, pos, run.counters.occ, bulk))

    signature = compute_signature(program, facts, run)
    return ProfileResult(program_text or "", graphs, signature,
                         run.cardinalities())
