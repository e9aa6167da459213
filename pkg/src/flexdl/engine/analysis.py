"""Shared rule analysis: which body occurrences play which role, which
attribute positions are bound when an occurrence is reached in a left-to-right
join, and helpers for turning sets of bound positions into index keys.
"""

from __future__ import annotations

from ..frontend import Const, Program, Rule, Var

# Roles a representation can play for an occurrence.
EDB_ROLE = "edb"
BASE_ROLE = "base"
DELTA_ROLE = "delta"
NEW_ROLE = "new"


def recursive_occurrences(rule: Rule, stratum_relations: frozenset[str]) -> list[int]:
    """Body positions referring to a relation of the stratum under evaluation."""
    return [i for i, atom in enumerate(rule.body) if atom.relation in stratum_relations]


def occurrence_role(program: Program, stratum_relations: frozenset[str],
                    rule: Rule, occ: int, delta_occ: int | None) -> str:
    atom = rule.body[occ]
    if program.is_edb(atom.relation):
        return EDB_ROLE
    if atom.relation in stratum_relations:
        return DELTA_ROLE if occ == delta_occ else BASE_ROLE
    return BASE_ROLE


def variant_order(rule: Rule, delta_occ: int | None,
                  delta_outermost: bool) -> tuple[int, ...]:
    """Occurrence order a plan joins in: written order, unless the caller asks
    for the delta occurrence to be pulled to the front of the loop nest."""
    n = len(rule.body)
    if delta_outermost and delta_occ is not None and delta_occ != 0:
        return (delta_occ,) + tuple(o for o in range(n) if o != delta_occ)
    return tuple(range(n))


def bound_positions(rule: Rule, occ: int,
                    before: tuple[int, ...] | None = None) -> tuple[int, ...]:
    """Attribute positions of body occurrence `occ` that carry a constant or a
    variable bound by an earlier occurrence, in position order. `before` names
    the occurrences already executed; it defaults to the written prefix.
    Positions that repeat a variable first seen in the same atom are not
    included; those are checked as filters after the probe."""
    earlier = rule.body[:occ] if before is None else [rule.body[i] for i in before]
    bound_vars: set[str] = set()
    for atom in earlier:
        for term in atom.args:
            if isinstance(term, Var):
                bound_vars.add(term.name)
    atom = rule.body[occ]
    positions = []
    seen_here: set[str] = set()
    for pos, term in enumerate(atom.args):
        if isinstance(term, Const):
            positions.append(pos)
        elif term.name in bound_vars:
            positions.append(pos)
        else:
            if term.name in seen_here:
                continue
            seen_here.add(term.name)
    return tuple(positions)


def bound_sets_by_occurrence(program: Program, stratum_relations: frozenset[str],
                             rule: Rule) -> list[tuple[int, ...]]:
    """Bound positions for every body occurrence, independent of which
    occurrence plays the delta role (binding order is textual either way)."""
    return [bound_positions(rule, i) for i in range(len(rule.body))]


def min_chain_cover(sets: list[frozenset[int]]) -> list[list[frozenset[int]]]:
    """Partition distinct attribute sets into the minimum number of chains
    under strict set inclusion. Any inclusion chain can be served by a single
    index key (order each set's new attributes after the previous set's), so
    the cover size is the minimum number of keys the sets require.

    Classic minimum path cover on the inclusion DAG via bipartite matching.
    """
    order = sorted(set(sets), key=lambda s: (len(s), tuple(sorted(s))))
    n = len(order)
    succ = [[j for j in range(n) if order[i] < order[j]] for i in range(n)]
    match_to: list[int] = [-1] * n  # right node j -> left node i

    def augment(i: int, visited: set[int]) -> bool:
        for j in succ[i]:
            if j in visited:
                continue
            visited.add(j)
            if match_to[j] == -1 or augment(match_to[j], visited):
                match_to[j] = i
                return True
        return False

    for i in range(n):
        augment(i, set())

    nxt: dict[int, int] = {}
    has_pred: set[int] = set()
    for j, i in enumerate(match_to):
        if i != -1:
            nxt[i] = j
            has_pred.add(j)
    chains = []
    for i in range(n):
        if i in has_pred:
            continue
        chain = []
        k: int | None = i
        while k is not None:
            chain.append(order[k])
            k = nxt.get(k)
        chains.append(chain)
    return chains


def chain_key(chain: list[frozenset[int]], arity: int) -> tuple[int, ...]:
    """Index key serving every set in an inclusion chain: each set's new
    attributes in ascending order, then the relation's remaining attributes."""
    attrs: list[int] = []
    covered: set[int] = set()
    for s in chain:
        attrs.extend(sorted(s - covered))
        covered |= s
    attrs.extend(a for a in range(arity) if a not in covered)
    return tuple(attrs)


def keys_for_sets(sets: list[frozenset[int]], arity: int) -> list[tuple[int, ...]]:
    """Minimal full-arity key set covering every bound set as a key prefix."""
    nonempty = [s for s in set(sets) if s]
    if not nonempty:
        return [tuple(range(arity))]
    return sorted(chain_key(c, arity) for c in min_chain_cover(nonempty))
