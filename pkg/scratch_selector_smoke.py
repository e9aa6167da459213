import sys
sys.path.insert(0, "src")

from flexdl.frontend import parse_program, stratify
from flexdl.profiler import (ProfileResult, RelationStats, StrategyStats,
                             WorkloadSignature, build_alignment_graph)
from flexdl.selector import select_configuration

ANDERSEN = """
.decl address_of/2 .edb
.decl assign/2 .edb
.decl load/2 .edb
.decl store/2 .edb
.decl points_to/2 .idb

points_to(x, y) :- address_of(x, y).
points_to(x, y) :- assign(x, z), points_to(z, y).
points_to(x, y) :- load(x, z), points_to(z, w), points_to(w, y).
points_to(w, y) :- store(v, x), points_to(v, w), points_to(x, y).
"""

program = parse_program(ANDERSEN)
strata = stratify(program)
print("strata:", [(s.relations, s.seed_rules, s.recursive_rules) for s in strata])

REC = frozenset({"points_to"})
stratum_of_rule = {0: frozenset(), 1: REC, 2: REC, 3: REC}

# Selective-join regime: probe calls dominate returned tuples, head
# arrivals are small. The load rule carries the criterion's exact numbers:
# 24.8M probe ops on the key-[1] path against 29K arrivals on key [0].
occ_counts = {
    # rule 0: seed from address_of
    (0, 0, "iterate", "edb"): (1, 10_000),
    (0, "head", "contains", "base"): (10_000, 0),
    (0, "head", "append", "base"): (9_500, 0),
    # rule 1: assign
    (1, 0, "iterate", "edb"): (15, 420_000),
    (1, 1, "probe", "delta"): (420_000, 48_000),
    (1, "head", "contains", "base"): (48_000, 0),
    (1, "head", "append", "base"): (30_000, 0),
    (1, "head", "contains", "new"): (18_000, 0),
    (1, "head", "append", "new"): (17_000, 0),
    # rule 2: load (criterion numbers on the first probe vs the head)
    (2, 0, "iterate", "edb"): (15, 24_800_000),
    (2, 1, "probe", "delta"): (12_000_000, 70_000),
    (2, 1, "probe", "base"): (12_800_000, 65_300),
    (2, 2, "probe", "delta"): (70_000, 40_000),
    (2, 2, "probe", "base"): (65_300, 35_000),
    (2, "head", "contains", "base"): (10_000, 0),
    (2, "head", "append", "base"): (9_900, 0),
    (2, "head", "contains", "new"): (5_000, 0),
    (2, "head", "append", "new"): (4_100, 0),
    # rule 3: store
    (3, 0, "iterate", "edb"): (15, 105_000),
    (3, 1, "probe", "delta"): (105_000, 60_000),
    (3, 1, "probe", "base"): (105_000, 55_000),
    (3, 2, "probe", "delta"): (60_000, 30_000),
    (3, 2, "probe", "base"): (55_000, 25_000),
    (3, "head", "contains", "base"): (30_000, 0),
    (3, "head", "append", "base"): (20_000, 0),
    (3, "head", "contains", "new"): (12_000, 0),
    (3, "head", "append", "new"): (11_000, 0),
}
bulk_counts = {("address_of", "edb"): 10_000, ("assign", "edb"): 28_000,
               ("load", "edb"): 1_600_000, ("store", "edb"): 7_000}

graphs = []
for ri, rule in enumerate(program.rules):
    b0 = rule.body[0]
    for cand in range(len(b0.args)):
        graphs.append(build_alignment_graph(
            program, stratum_of_rule[ri], ri, cand, occ_counts, bulk_counts))

sizes = {"address_of": 10_000, "assign": 28_000, "load": 9_000,
         "store": 7_000, "points_to": 1_500_000}
relstats = [RelationStats(name, program.is_edb(name), 2, sizes[name], 2, [], [])
            for name in program.declarations]
sig = WorkloadSignature(
    relations=relstats,
    strategy=[StrategyStats("points_to", offers=18_750_000,
                            new_tuples=1_500_000,
                            duplicate_ratio=12.5, new_ratio=0.08)],
    iterations=[14],
)
profile = ProfileResult(ANDERSEN, graphs, sig, {"points_to": 1_500_000})

sel = select_configuration(profile, program)
print()
print("strategy:", sel.strategy)
for name in sorted(sel.base):
    print("base", name, [(c.access, c.ds, c.key) for c in sel.base[name]])
for name in sorted(sel.delta):
    print("delta", name, [(c.access, c.ds, c.key) for c in sel.delta[name]])
print("map:", {k: v for k, v in sorted(sel.occurrence_map.items())})
print("partitions:")
for p in sel.partitions:
    print("  ", p)
print()
print(sel.config_text(program))

# criterion: the chosen config must validate
cfg = sel.to_eval_config()
cfg.validate(program)
print("validates ok")

# golden assertions
assert sel.base["address_of"] == [("CI", "SA", (0, 1))] or \
    [(c.access, c.ds, c.key) for c in sel.base["address_of"]] == [("CI", "SA", (0, 1))]
assert [(c.access, c.ds, c.key) for c in sel.base["assign"]] == [("CI", "SA", (1,))]
assert [(c.access, c.ds, c.key) for c in sel.base["load"]] == [("CI", "SA", (1,))]
assert [(c.access, c.ds, c.key) for c in sel.base["store"]] == [("CI", "SA", (0,))]
pt = sorted((c.access, c.ds, c.key) for c in sel.base["points_to"])
assert pt == [("CI", "HT", (0,)), ("CI", "HT", (0, 1))], pt
assert [(c.access, c.ds, c.key) for c in sel.delta["points_to"]] == [("CI", "BP", (0, 1))]
print("C5 golden OK")

# criterion 6: swapping the load-rule magnitudes flips the key
occ2 = dict(occ_counts)
occ2[(2, 1, "probe", "delta")] = (14_000, 8_000)
occ2[(2, 1, "probe", "base")] = (15_000, 7_000)
occ2[(2, 2, "probe", "delta")] = (8_000, 4_000)
occ2[(2, 2, "probe", "base")] = (7_000, 3_000)
occ2[(2, "head", "contains", "base")] = (14_000_000, 0)
occ2[(2, "head", "append", "base")] = (6_000_000, 0)
occ2[(2, "head", "contains", "new")] = (3_000_000, 0)
occ2[(2, "head", "append", "new")] = (1_800_000, 0)
graphs2 = []
for ri, rule in enumerate(program.rules):
    for cand in range(len(rule.body[0].args)):
        graphs2.append(build_alignment_graph(
            program, stratum_of_rule[ri], ri, cand, occ2, bulk_counts))
profile2 = ProfileResult(ANDERSEN, graphs2, sig, {"points_to": 1_500_000})
sel2 = select_configuration(profile2, program)
k1 = [c.key for c in sel.base["load"]]
k2 = [c.key for c in sel2.base["load"]]
print("load keys before/after swap:", k1, k2)
assert k1 == [(1,)] and k2 != k1, (k1, k2)
print("C6 flip OK")
