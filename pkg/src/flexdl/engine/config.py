"""Evaluation configuration: which representations back each relation in each
role, the duplicate-elimination strategy, and optional explicit bindings from
rule occurrences to representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (
    InvalidCombinationError,
    KeyMismatchError,
    MissingRepresentationError,
    PrefixProbeUnsupportedError,
)
from ..frontend import Program, Stratum, stratify
from ..storage import RepConfig, check_key
from ..storage.core import probe_order
from . import analysis

STRATEGIES = ("S1", "S2", "S3", "S4")


@dataclass
class EvalConfig:
    """base holds one entry per relation (EDB relations and the accumulated
    result of IDB relations). delta and new cover IDB relations evaluated
    recursively; the two must be configured identically per relation because
    new is rebranded to delta at the end of every pass.

    occurrence_map optionally pins a body occurrence (rule index, body
    position) of a base- or EDB-role atom to the representation with the given
    key; unmapped occurrences resolve automatically by key match. Delta-role
    occurrences always resolve within the delta list.
    """

    base: dict[str, list[RepConfig]] = field(default_factory=dict)
    delta: dict[str, list[RepConfig]] = field(default_factory=dict)
    new: dict[str, list[RepConfig]] = field(default_factory=dict)
    strategy: str = "S1"
    occurrence_map: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    delta_outermost: bool = False
    node_capacity: int = 16

    def validate(self, program: Program, strata: list[Stratum] | None = None) -> None:
        if self.strategy not in STRATEGIES:
            raise InvalidCombinationError(f"unknown strategy {self.strategy!r}")
        if strata is None:
            strata = stratify(program)
        for name in program.declarations:
            if not self.base.get(name):
                raise MissingRepresentationError(
                    f"relation {name!r} has no base representation")
        recursive_rels = set()
        for stratum in strata:
            if stratum.recursive_rules:
                recursive_rels.update(stratum.relations)
        for name in sorted(recursive_rels):
            if not self.delta.get(name):
                raise MissingRepresentationError(
                    f"recursive relation {name!r} has no delta representation")
            if self.new.get(name, []) != self.delta.get(name, []):
                raise KeyMismatchError(
                    f"relation {name!r}: new representations must match delta "
                    "(new is rebranded to delta after each pass)")
        for name, configs in list(self.base.items()) + list(self.delta.items()):
            arity = program.arity(name)
            for cfg in configs:
                if cfg.key is not None:
                    check_key(cfg.key, arity)
        # Every occurrence of every rule variant must resolve to a usable
        # representation; surfacing that here beats failing mid-evaluation.
        for si, stratum in enumerate(strata):
            for ri in stratum.seed_rules:
                self._check_rule(program, stratum, ri, None)
            for ri in stratum.recursive_rules:
                rule = program.rules[ri]
                for occ in analysis.recursive_occurrences(rule, stratum.relations):
                    self._check_rule(program, stratum, ri, occ)

    def _check_rule(self, program: Program, stratum: Stratum,
                    rule_idx: int, delta_occ: int | None) -> None:
        rule = program.rules[rule_idx]
        order = analysis.variant_order(rule, delta_occ, self.delta_outermost)
        for step, occ in enumerate(order):
            role = analysis.occurrence_role(program, stratum.relations, rule,
                                            occ, delta_occ)
            bound = analysis.bound_positions(rule, occ, order[:step])
            self.resolve(program, rule_idx, occ, role,
                         rule.body[occ].relation, bound)

    def configs_for(self, relation: str, role: str) -> list[RepConfig]:
        if role == analysis.DELTA_ROLE:
            return self.delta.get(relation, [])
        if role == analysis.NEW_ROLE:
            return self.new.get(relation, [])
        return self.base.get(relation, [])

    def resolve(self, program: Program, rule_idx: int, occ: int, role: str,
                relation: str, bound: tuple[int, ...]) -> RepConfig:
        """Pick the representation serving an occurrence whose bound attribute
        positions are `bound`. Explicit occurrence_map entries are honored for
        base/EDB roles; otherwise the first representation whose key matches
        wins, preferring an exact hash/key match, then the shortest covering
        ordered key, then full scan."""
        configs = self.configs_for(relation, role)
        if not configs:
            raise MissingRepresentationError(
                f"rule {rule_idx}, occurrence {occ}: relation {relation!r} "
                f"has no {role} representation")
        pinned = self.occurrence_map.get((rule_idx, occ))
        if pinned is not None and role in (analysis.BASE_ROLE, analysis.EDB_ROLE):
            for cfg in configs:
                if cfg.key == pinned:
                    self._check_usable(cfg, bound, rule_idx, occ, relation,
                                       program.arity(relation))
                    return cfg
            raise MissingRepresentationError(
                f"rule {rule_idx}, occurrence {occ}: no {role} representation "
                f"of {relation!r} has key {pinned}")
        bound_set = frozenset(bound)
        if not bound_set:
            # Nothing bound: any representation can iterate; keep list order.
            return configs[0]
        arity = program.arity(relation)
        exact = None
        prefix = None
        scan = None
        for cfg in configs:
            if cfg.access == "FS":
                if scan is None:
                    scan = cfg
                continue
            if cfg.ds == "HT":
                if frozenset(cfg.key) == bound_set:
                    if exact is None:
                        exact = cfg
                continue
            # SA and BP sort by the declared key extended with the remaining
            # attributes, so probes may run past the declared key; UKI and RX
            # representations stop at the key itself.
            eff = probe_order(cfg, arity)
            if frozenset(eff[:len(bound_set)]) == bound_set:
                if prefix is None or len(cfg.key) < len(prefix.key):
                    prefix = cfg
        chosen = exact or prefix or scan
        if chosen is None:
            for cfg in configs:
                if cfg.ds == "HT" and bound_set < frozenset(cfg.key):
                    raise PrefixProbeUnsupportedError(
                        f"rule {rule_idx}, occurrence {occ}: hash index on "
                        f"{relation!r} key {cfg.key} cannot serve prefix "
                        f"probe over positions {tuple(sorted(bound_set))}")
            raise KeyMismatchError(
                f"rule {rule_idx}, occurrence {occ}: no {role} representation "
                f"of {relation!r} serves bound positions {tuple(sorted(bound_set))}")
        return chosen

    def _check_usable(self, cfg: RepConfig, bound: tuple[int, ...],
                      rule_idx: int, occ: int, relation: str, arity: int) -> None:
        bound_set = frozenset(bound)
        if cfg.access == "FS" or not bound_set:
            return
        if cfg.ds == "HT":
            if frozenset(cfg.key) != bound_set:
                raise PrefixProbeUnsupportedError(
                    f"rule {rule_idx}, occurrence {occ}: hash index on "
                    f"{relation!r} key {cfg.key} cannot serve prefix probe "
                    f"over positions {tuple(sorted(bound_set))}")
            return
        eff = probe_order(cfg, arity)
        if frozenset(eff[:len(bound_set)]) != bound_set:
            raise KeyMismatchError(
                f"rule {rule_idx}, occurrence {occ}: key {cfg.key} on "
                f"{relation!r} does not cover bound positions "
                f"{tuple(sorted(bound_set))} as a prefix")


def uniform_config(program: Program, access: str, ds: str, strategy: str = "S1",
                   node_capacity: int = 16) -> EvalConfig:
    """Configuration giving every relation the same access type and data
    structure. Index keys are synthesized from the rules: the bound attribute
    sets of every occurrence are covered by a minimal number of keys (hash
    structures get one key per distinct bound set, since they only answer
    full-key probes). Relations probed under no attributes get the identity
    key. For FS the data structure argument is ignored and row stores back
    every relation."""
    strata = stratify(program)
    stratum_of: dict[str, int] = {}
    for si, stratum in enumerate(strata):
        for rel in stratum.relations:
            stratum_of[rel] = si
    base_sets: dict[str, set[frozenset[int]]] = {
        name: set() for name in program.declarations}
    delta_sets: dict[str, set[frozenset[int]]] = {}
    recursive_rels: list[str] = []
    for stratum in strata:
        if stratum.recursive_rules:
            for rel in sorted(stratum.relations):
                recursive_rels.append(rel)
                delta_sets[rel] = set()
    for si, stratum in enumerate(strata):
        variants: list[tuple[int, int | None]] = [(ri, None) for ri in stratum.seed_rules]
        for ri in stratum.recursive_rules:
            rule = program.rules[ri]
            for occ in analysis.recursive_occurrences(rule, stratum.relations):
                variants.append((ri, occ))
        for ri, delta_occ in variants:
            rule = program.rules[ri]
            for occ in range(len(rule.body)):
                atom = rule.body[occ]
                role = analysis.occurrence_role(program, stratum.relations,
                                                rule, occ, delta_occ)
                bound = frozenset(analysis.bound_positions(rule, occ))
                if role == analysis.DELTA_ROLE:
                    delta_sets[atom.relation].add(bound)
                else:
                    base_sets[atom.relation].add(bound)

    def build(relation: str, sets: set[frozenset[int]]) -> list[RepConfig]:
        arity = program.arity(relation)
        if access == "FS":
            return [RepConfig("FS", "RS", None)]
        if ds == "HT":
            keys = sorted(tuple(sorted(s)) for s in sets if s)
            if not keys:
                keys = [tuple(range(arity))]
            return [RepConfig(access, ds, k) for k in keys]
        keys = analysis.keys_for_sets(list(sets), arity)
        return [RepConfig(access, ds, k) for k in keys]

    cfg = EvalConfig(strategy=strategy, node_capacity=node_capacity)
    for name in program.declarations:
        cfg.base[name] = build(name, base_sets[name])
    for name in recursive_rels:
        reps = build(name, delta_sets[name])
        cfg.delta[name] = list(reps)
        cfg.new[name] = list(reps)
    return cfg
