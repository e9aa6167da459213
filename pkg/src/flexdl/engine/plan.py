"""Left-deep join plans over rule bodies. Atoms are joined in the order they
are written: the first occurrence drives the loop (iterated, or probed when it
carries constants) and every later occurrence is probed under the attributes
bound so far. One plan is built per rule variant, where a variant designates
which recursive body occurrence reads the delta. Setting ``delta_outermost``
on the config moves that occurrence to the front of the loop nest instead;
the supplied keys must then serve the bound sets of the rotated order.
"""

from __future__ import annotations

from ..frontend import Const, Program, Var
from ..storage.core import probe_order
from . import analysis


class RepHandle:
    """A representation instance bound to its counter bucket."""

    __slots__ = ("rep", "rep_id", "counts", "cfg")

    def __init__(self, rep, rep_id, counts, cfg):
        self.rep = rep
        self.rep_id = rep_id
        self.counts = counts
        self.cfg = cfg


class _Level:
    __slots__ = ("occ", "role", "handle", "kind", "values", "plen",
                 "scan_positions", "filter", "writes")

    def __init__(self, occ, role, handle, kind, values, plen, scan_positions,
                 filt, writes):
        self.occ = occ
        self.role = role
        self.handle = handle
        self.kind = kind  # "iter" | "probe" | "scan"
        self.values = values
        self.plen = plen
        self.scan_positions = scan_positions
        self.filter = filt
        self.writes = writes


class JoinPlan:
    __slots__ = ("rule_idx", "delta_occ", "levels", "head_fn", "nslots",
                 "head_relation")

    def __init__(self, rule_idx, delta_occ, levels, head_fn, nslots,
                 head_relation):
        self.rule_idx = rule_idx
        self.delta_occ = delta_occ
        self.levels = levels
        self.head_fn = head_fn
        self.nslots = nslots
        self.head_relation = head_relation


def _make_values(sources):
    """Compile probe-value construction. sources: ('s', slot) / ('c', const)
    in probe order."""
    if all(kind == "s" for kind, _ in sources):
        slots = tuple(s for _, s in sources)
        if len(slots) == 1:
            i, = slots
            return lambda vals: (vals[i],)
        if len(slots) == 2:
            i, j = slots
            return lambda vals: (vals[i], vals[j])
        return lambda vals: tuple([vals[s] for s in slots])
    template = tuple(v if kind == "c" else None for kind, v in sources)
    fills = tuple((ix, src[1]) for ix, src in enumerate(sources) if src[0] == "s")

    def build(vals, template=template, fills=fills):
        out = list(template)
        for ix, slot in fills:
            out[ix] = vals[slot]
        return tuple(out)

    return build


def _make_filter(pair_checks):
    """pair_checks: (pos, earlier_pos) for a variable repeated inside one
    atom. Everything else bound at a level is covered by its probe, so these
    equality checks are the only residual filters a level can carry."""
    if not pair_checks:
        return None
    if len(pair_checks) == 1:
        (p, q), = pair_checks
        return lambda t, p=p, q=q: t[p] == t[q]

    def check(t, pair_checks=tuple(pair_checks)):
        for p, q in pair_checks:
            if t[p] != t[q]:
                return False
        return True

    return check


def _make_head(args, slots):
    sources = []
    for term in args:
        if isinstance(term, Const):
            sources.append(("c", term.value))
        else:
            sources.append(("s", slots[term.name]))
    if all(kind == "s" for kind, _ in sources):
        ixs = tuple(s for _, s in sources)
        if len(ixs) == 1:
            i, = ixs
            return lambda vals: (vals[i],)
        if len(ixs) == 2:
            i, j = ixs
            return lambda vals: (vals[i], vals[j])
        if len(ixs) == 3:
            i, j, k = ixs
            return lambda vals: (vals[i], vals[j], vals[k])
        return lambda vals: tuple([vals[s] for s in ixs])
    return _make_values(sources)


def plan_rule(program: Program, stratum_relations: frozenset[str],
              rule_idx: int, delta_occ: int | None, config, lookup) -> JoinPlan:
    """Build the executable plan for one rule variant. `lookup(relation, role,
    rep_config)` returns the RepHandle backing that representation."""
    rule = program.rules[rule_idx]
    slots: dict[str, int] = {}
    levels: list[_Level] = []
    occ_order = analysis.variant_order(rule, delta_occ, config.delta_outermost)
    for step, occ in enumerate(occ_order):
        atom = rule.body[occ]
        role = analysis.occurrence_role(program, stratum_relations, rule, occ,
                                        delta_occ)
        bound = analysis.bound_positions(rule, occ, occ_order[:step])
        repcfg = config.resolve(program, rule_idx, occ, role, atom.relation,
                                bound)
        handle = lookup(atom.relation, role, repcfg)
        term_at = atom.args

        def source_for(pos: int):
            term = term_at[pos]
            if isinstance(term, Const):
                return ("c", term.value)
            return ("s", slots[term.name])

        values = None
        plen = 0
        scan_positions = None
        if not bound:
            kind = "iter"
        elif repcfg.access == "FS":
            kind = "scan"
            scan_positions = bound
            values = _make_values([source_for(p) for p in bound])
        else:
            kind = "probe"
            plen = len(bound)
            if repcfg.ds == "HT":
                key_order = repcfg.key
            else:
                key_order = probe_order(repcfg, program.arity(atom.relation))
            probe_positions = key_order[:plen]
            values = _make_values([source_for(p) for p in probe_positions])

        pair_checks = []
        writes = []
        first_pos: dict[str, int] = {}
        for pos, term in enumerate(atom.args):
            if isinstance(term, Const):
                continue  # constants are always part of the probe
            name = term.name
            if name in first_pos:
                pair_checks.append((pos, first_pos[name]))
                continue
            first_pos[name] = pos
            if name in slots:
                continue  # bound earlier, covered by the probe
            slot = len(slots)
            slots[name] = slot
            writes.append((pos, slot))

        filt = _make_filter(pair_checks)
        levels.append(_Level(occ, role, handle, kind, values, plen,
                             scan_positions, filt, tuple(writes)))

    head_fn = _make_head(rule.head.args, slots)
    return JoinPlan(rule_idx, delta_occ, levels, head_fn, len(slots),
                    rule.head.relation)


def _fetch(level, vals):
    if level.kind == "iter":
        return list(level.handle.rep.iterate()), "iterate"
    if level.kind == "scan":
        return (level.handle.rep.probe_scan(level.scan_positions,
                                            level.values(vals)), "probe")
    return level.handle.rep.probe(level.values(vals), level.plen), "probe"


def execute_plan(plan: JoinPlan, sink, counters) -> None:
    """Run the plan, feeding every derived head fact to `sink`. Operation
    counts land on each level's representation bucket and on the per-rule
    occurrence profile."""
    levels = plan.levels
    n = len(levels)
    vals = [None] * plan.nslots
    calls = [0] * n
    returned = [0] * n
    ops = [None] * n
    head_fn = plan.head_fn

    def run(li: int) -> None:
        level = levels[li]
        out, op = _fetch(level, vals)
        ops[li] = op
        calls[li] += 1
        returned[li] += len(out)
        filt = level.filter
        writes = level.writes
        last = li == n - 1
        if last:
            if filt is None:
                for t in out:
                    for p, s in writes:
                        vals[s] = t[p]
                    sink(head_fn(vals))
            else:
                for t in out:
                    if not filt(t):
                        continue
                    for p, s in writes:
                        vals[s] = t[p]
                    sink(head_fn(vals))
        else:
            nxt = li + 1
            if filt is None:
                for t in out:
                    for p, s in writes:
                        vals[s] = t[p]
                    run(nxt)
            else:
                for t in out:
                    if not filt(t):
                        continue
                    for p, s in writes:
                        vals[s] = t[p]
                    run(nxt)

    run(0)

    for li, level in enumerate(levels):
        op = ops[li]
        if op is None:
            continue
        c = level.handle.counts
        if op == "iterate":
            c.iterate_calls += calls[li]
            c.iterate_returned += returned[li]
        else:
            c.probe_calls += calls[li]
            c.probe_returned += returned[li]
        counters.add_occ((plan.rule_idx, level.occ, op, level.role),
                         calls[li], returned[li])
