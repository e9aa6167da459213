"""Reference evaluator: naive fixpoint over plain Python sets.

Re-derives every rule from scratch each pass until nothing changes. No
stratification, no delta, no storage layer; used as the semantics oracle the
engine is checked against.
"""

from __future__ import annotations

from collections import defaultdict

from ..errors import MissingFactsError
from ..frontend import Const, Program, Rule, Var


def _rule_shape(rule: Rule):
    """Static per-rule analysis: slot numbering for variables, and for every
    body atom the probe positions (constant or previously bound) with their
    value sources, the fresh-variable writes, and in-atom repeat checks."""
    slots: dict[str, int] = {}
    shape = []
    for atom in rule.body:
        probe_positions = []
        sources = []  # ("c", value) | ("s", slot)
        writes = []
        repeats = []
        first_pos: dict[str, int] = {}
        for pos, term in enumerate(atom.args):
            if isinstance(term, Const):
                probe_positions.append(pos)
                sources.append(("c", term.value))
                continue
            name = term.name
            if name in first_pos:
                repeats.append((pos, first_pos[name]))
                continue
            first_pos[name] = pos
            if name in slots:
                probe_positions.append(pos)
                sources.append(("s", slots[name]))
            else:
                slot = len(slots)
                slots[name] = slot
                writes.append((pos, slot))
        shape.append((atom.relation, tuple(probe_positions), tuple(sources),
                      tuple(writes), tuple(repeats)))
    head = []
    for term in rule.head.args:
        if isinstance(term, Const):
            head.append(("c", term.value))
        else:
            head.append(("s", slots[term.name]))
    return shape, tuple(head), len(slots)


def _eval_rule(relations: dict[str, set], shape, head, nslots) -> set:
    # Hash-index every probed atom for this pass.
    indexes = []
    for relation, probe_positions, _, _, _ in shape:
        if not probe_positions:
            indexes.append(None)
            continue
        idx = defaultdict(list)
        for t in relations[relation]:
            idx[tuple(t[p] for p in probe_positions)].append(t)
        indexes.append(idx)

    out = set()
    vals = [None] * nslots
    n = len(shape)

    def rec(i: int) -> None:
        if i == n:
            out.add(tuple(v if kind == "c" else vals[v] for kind, v in head))
            return
        relation, probe_positions, sources, writes, repeats = shape[i]
        if indexes[i] is None:
            candidates = relations[relation]
        else:
            key = tuple(v if kind == "c" else vals[v] for kind, v in sources)
            candidates = indexes[i].get(key, ())
        for t in candidates:
            ok = True
            for p, q in repeats:
                if t[p] != t[q]:
                    ok = False
                    break
            if not ok:
                continue
            for p, s in writes:
                vals[s] = t[p]
            rec(i + 1)

    rec(0)
    return out


def naive_eval(program: Program, facts: dict[str, list]) -> dict[str, frozenset]:
    """Evaluate to fixpoint and return the final contents of every IDB
    relation as frozensets."""
    relations: dict[str, set] = {}
    for name in program.declarations:
        if program.is_edb(name):
            if name not in facts:
                raise MissingFactsError(
                    f"no facts supplied for EDB relation {name!r}")
            relations[name] = set(facts[name])
        else:
            relations[name] = set(facts.get(name, []))

    shapes = [( _rule_shape(rule), rule.head.relation) for rule in program.rules]
    changed = True
    while changed:
        changed = False
        for (shape, head, nslots), head_rel in shapes:
            derived = _eval_rule(relations, shape, head, nslots)
            target = relations[head_rel]
            before = len(target)
            target |= derived
            if len(target) != before:
                changed = True
    return {name: frozenset(relations[name])
            for name in program.idb_relations()}
