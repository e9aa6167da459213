"""Evaluation driver tests: semi-naive fixpoints against the naive oracle,
strategy state equivalence, counter determinism, plan resolution errors."""

import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexdl.engine import naive_eval
from flexdl.engine.config import EvalConfig, uniform_config
from flexdl.engine.counters import OpCounters
from flexdl.engine.run import RelationRT, run_program
from flexdl.engine.strategies import STRATEGY_NAMES, make_strategy
from flexdl.errors import (
    KeyMismatchError,
    MissingFactsError,
    MissingRepresentationError,
    PrefixProbeUnsupportedError,
)
from flexdl.frontend import parse_program
from flexdl.storage import RepConfig

from conftest import ALL_COMBOS, run_uniform
from oracles import andersen_points_to, transitive_closure

TC = """\
.decl edge/2 .edb
.decl path/2 .idb
path(x, y) :- edge(x, y).
path(x, z) :- path(x, y), edge(y, z).
"""

REACH = """\
.decl edge/2 .edb
.decl seed/1 .edb
.decl reachable/1 .idb
reachable(x) :- seed(x).
reachable(y) :- reachable(x), edge(x, y).
reachable(x) :- reachable(y), edge(x, y).
"""

ANDERSEN = """\
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

# The worked six-node example: directed edges traversed in both directions.
EXAMPLE_EDGES = [(0, 1), (1, 2), (1, 4), (2, 3), (4, 5)]


def random_edges(rng, n, m):
    return sorted({(rng.randrange(n), rng.randrange(n)) for _ in range(m)})


# -- fixpoint correctness ---------------------------------------------------


def test_example_graph_reaches_every_node():
    result = run_uniform(REACH, {"edge": EXAMPLE_EDGES, "seed": [(2,)]},
                         "CI", "BP")
    assert result.result_sets()["reachable"] == \
        frozenset({(0,), (1,), (2,), (3,), (4,), (5,)})


def test_tc_three_hop_chain():
    result = run_uniform(TC, {"edge": [(1, 2), (2, 3)]}, "CI", "SA")
    assert result.result_sets()["path"] == \
        frozenset({(1, 2), (2, 3), (1, 3)})
    # Two productive passes plus the empty one that closes the fixpoint.
    assert result.counters.strata_iterations == [3]


def test_empty_seed_closes_in_one_iteration():
    result = run_uniform(REACH, {"edge": EXAMPLE_EDGES, "seed": []},
                         "CI", "BP")
    assert result.result_sets()["reachable"] == frozenset()
    assert result.counters.strata_iterations == [1]


def test_edb_only_program():
    program = parse_program(".decl r/2 .edb")
    config = uniform_config(program, "CI", "SA")
    result = run_program(program, {"r": [(1, 2), (3, 4)]}, config)
    assert result.results == {}
    loads = sum(c.bulk_load_tuples for c in result.counters.reps.values())
    assert loads == 2


def test_semi_naive_matches_naive_on_random_graphs():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(2, 25)
        edges = random_edges(rng, n, rng.randint(1, 60))
        facts = {"edge": edges}
        want = naive_eval(parse_program(TC), facts)["path"]
        assert want == frozenset(transitive_closure(edges))
        got = run_uniform(TC, facts, "CI", "BP").result_sets()["path"]
        assert got == want


def test_andersen_variants_match_oracles():
    """Rules with two recursive occurrences run once per occurrence; the
    union must still equal the least fixpoint."""
    rng = random.Random(5)
    for _ in range(6):
        nv = rng.randint(3, 12)
        facts = {
            "address_of": sorted({(rng.randrange(nv), rng.randrange(nv, 2 * nv))
                                  for _ in range(nv)}),
            "assign": sorted({(rng.randrange(nv), rng.randrange(nv))
                              for _ in range(nv)}),
            "load": sorted({(rng.randrange(nv), rng.randrange(nv))
                            for _ in range(max(1, nv // 3))}),
            "store": sorted({(rng.randrange(nv), rng.randrange(nv))
                             for _ in range(max(1, nv // 3))}),
        }
        want = frozenset(andersen_points_to(
            facts["address_of"], facts["assign"], facts["load"],
            facts["store"]))
        assert naive_eval(parse_program(ANDERSEN), facts)["points_to"] == want
        got = run_uniform(ANDERSEN, facts, "CI", "HT").result_sets()
        assert got["points_to"] == want


def test_all_combos_and_strategies_agree_on_one_graph():
    rng = random.Random(99)
    edges = random_edges(rng, 15, 40)
    want = frozenset(transitive_closure(edges))
    for access, ds in ALL_COMBOS:
        for strategy in STRATEGY_NAMES:
            got = run_uniform(TC, {"edge": edges}, access, ds,
                              strategy=strategy).result_sets()["path"]
            assert got == want, (access, ds, strategy)


def test_idb_seed_facts_are_deduplicated():
    result = run_uniform(TC, {"edge": [(1, 2)], "path": [(9, 9), (9, 9)]},
                         "CI", "SA")
    assert result.result_sets()["path"] == frozenset({(1, 2), (9, 9)})


# -- determinism ------------------------------------------------------------


def test_counters_are_reproducible():
    rng = random.Random(3)
    edges = random_edges(rng, 30, 120)
    first = run_uniform(TC, {"edge": edges}, "CI", "BP")
    second = run_uniform(TC, {"edge": edges}, "CI", "BP")
    assert first.counters.as_dict() == second.counters.as_dict()
    assert first.cardinalities() == second.cardinalities()
    assert first.footprints == second.footprints


# -- strategies -------------------------------------------------------------


def drive_strategy(name, base, stream, arity=1, ds="BP"):
    counters = OpCounters()
    rt = RelationRT("t", arity, counters, 16)
    cfg = [RepConfig("CI", ds, tuple(range(arity)))]
    rt.setup_base(cfg)
    rt.bulk_load_base(base)
    rt.setup_delta(cfg)
    rt.make_new()
    state = make_strategy(name, rt)
    for t in stream:
        state.offer(t)
    state.finish()
    return (frozenset(rt.base_handles[0].rep.iterate()),
            frozenset(rt.new_handles[0].rep.iterate()),
            counters)


def test_strategy_final_states_match_the_worked_example():
    base = [(1,)]
    stream = [(1,), (2,), (2,)]
    for name in STRATEGY_NAMES:
        got_base, got_new, _ = drive_strategy(name, base, stream)
        assert got_base == frozenset({(1,), (2,)}), name
        assert got_new == frozenset({(2,)}), name


def test_s1_counter_profile_on_the_worked_example():
    _, _, counters = drive_strategy("S1", [(1,)], [(1,), (2,), (2,)])
    by_role = {rid.split("/")[0]: c for rid, c in counters.reps.items()}
    assert by_role["t[base]"].contains_calls == 3
    assert by_role["t[new]"].contains_calls == 2
    assert by_role["t[new]"].append_calls == 1


@given(st.lists(st.integers(0, 9), max_size=25),
       st.lists(st.integers(0, 9), max_size=40))
@settings(max_examples=80, deadline=None)
def test_strategies_reach_identical_state(base_vals, stream_vals):
    base = [(v,) for v in sorted(set(base_vals))]
    stream = [(v,) for v in stream_vals]
    want_base = frozenset(base) | frozenset(stream)
    want_new = frozenset(stream) - frozenset(base)
    for name in STRATEGY_NAMES:
        got_base, got_new, _ = drive_strategy(name, base, stream)
        assert got_base == want_base, name
        assert got_new == want_new, name


def test_empty_stream_changes_nothing():
    for name in STRATEGY_NAMES:
        got_base, got_new, _ = drive_strategy(name, [(4,)], [])
        assert got_base == frozenset({(4,)})
        assert got_new == frozenset()


# -- configuration validation ----------------------------------------------


def test_missing_edb_facts():
    program = parse_program(TC)
    config = uniform_config(program, "CI", "SA")
    with pytest.raises(MissingFactsError):
        run_program(program, {}, config)


def test_missing_base_representation():
    program = parse_program(TC)
    config = uniform_config(program, "CI", "SA")
    broken = dataclasses.replace(
        config, base={k: v for k, v in config.base.items() if k != "edge"})
    with pytest.raises(MissingRepresentationError):
        broken.validate(program)


def test_new_must_mirror_delta():
    program = parse_program(TC)
    config = uniform_config(program, "CI", "BP")
    broken = dataclasses.replace(
        config, new={"path": [RepConfig("CI", "HT", (0, 1))]})
    with pytest.raises(KeyMismatchError):
        broken.validate(program)


def test_ht_cannot_serve_prefix_probes():
    program = parse_program(TC)
    config = uniform_config(program, "CI", "HT")
    # The recursive rule probes edge on its first attribute only; a hash
    # keyed on both cannot answer that.
    broken = dataclasses.replace(
        config, base=dict(config.base,
                          edge=[RepConfig("CI", "HT", (0, 1))]))
    with pytest.raises(PrefixProbeUnsupportedError):
        broken.validate(program)


def test_unusable_key_is_rejected():
    program = parse_program(TC)
    config = uniform_config(program, "CI", "SA")
    broken = dataclasses.replace(
        config, base=dict(config.base,
                          edge=[RepConfig("UKI", "SA", (1,))]))
    # UKI stops at its declared key, which does not cover a probe bound on
    # attribute 0 -- and a UKI group needs a store, so validation must
    # reject before evaluation starts.
    with pytest.raises(KeyMismatchError):
        broken.validate(program)


def test_unknown_strategy_is_rejected():
    program = parse_program(TC)
    config = dataclasses.replace(uniform_config(program, "CI", "SA"),
                                 strategy="S9")
    with pytest.raises(Exception):
        config.validate(program)


# -- occurrence pinning and plan shape --------------------------------------


def test_occurrence_map_routes_probes():
    program = parse_program(TC)
    base = {
        "edge": [RepConfig("CI", "HT", (0,)), RepConfig("CI", "SA", (0, 1))],
        "path": [RepConfig("CI", "HT", (0, 1))],
    }
    deltas = {"path": [RepConfig("CI", "BP", (0, 1))]}
    pinned = EvalConfig(base=base, delta=deltas, new=deltas,
                        occurrence_map={(1, 1): (0, 1)})
    free = EvalConfig(base=base, delta=deltas, new=deltas)
    edges = random_edges(random.Random(7), 12, 30)
    want = frozenset(transitive_closure(edges))

    res_pinned = run_program(program, {"edge": edges}, pinned)
    res_free = run_program(program, {"edge": edges}, free)
    assert res_pinned.result_sets()["path"] == want
    assert res_free.result_sets()["path"] == want

    sa_probes = res_pinned.counters.reps["edge[base]/0_1:CI-SA"].probe_calls
    ht_probes = res_pinned.counters.reps["edge[base]/0:CI-HT"].probe_calls
    assert sa_probes > 0 and ht_probes == 0
    # Unpinned resolution prefers the exact hash key instead.
    assert res_free.counters.reps["edge[base]/0:CI-HT"].probe_calls > 0


def test_pinning_a_nonexistent_key_fails():
    program = parse_program(TC)
    config = uniform_config(program, "CI", "SA")
    bad = dataclasses.replace(config, occurrence_map={(1, 1): (1,)})
    with pytest.raises(MissingRepresentationError):
        bad.validate(program)


def test_delta_outermost_flag_moves_the_loop():
    text = """\
.decl edge/2 .edb
.decl path/2 .idb
path(x, y) :- edge(x, y).
path(x, z) :- edge(x, y), path(y, z).
"""
    program = parse_program(text)
    edges = random_edges(random.Random(21), 14, 35)
    want = frozenset(transitive_closure(edges))

    def config(flag):
        # edge keyed on its second attribute so it can take probes when the
        # rotated order binds y first.
        return EvalConfig(base={"edge": [RepConfig("CI", "BP", (1, 0))],
                                "path": [RepConfig("CI", "BP", (0, 1))]},
                          delta={"path": [RepConfig("CI", "BP", (0, 1))]},
                          new={"path": [RepConfig("CI", "BP", (0, 1))]},
                          delta_outermost=flag)

    off = run_program(program, {"edge": edges}, config(False))
    on = run_program(program, {"edge": edges}, config(True))
    assert off.result_sets()["path"] == want
    assert on.result_sets()["path"] == want
    # Written order iterates edge and probes the delta; the flag rotates the
    # delta occurrence to the front, so edge takes the probes instead.
    assert (1, 0, "iterate", "edb") in off.counters.occ
    assert (1, 1, "probe", "delta") in off.counters.occ
    assert (1, 1, "iterate", "delta") in on.counters.occ
    assert (1, 0, "probe", "edb") in on.counters.occ
    # Identity keys serve the written order only; validation catches that up
    # front when the flag rotates the bound sets.
    with pytest.raises(KeyMismatchError):
        run_program(program, {"edge": edges},
                    dataclasses.replace(uniform_config(program, "CI", "BP"),
                                        delta_outermost=True))


def test_multi_stratum_program_orders_evaluation():
    text = """\
.decl edge/2 .edb
.decl path/2 .idb
.decl twohop/2 .idb
path(x, y) :- edge(x, y).
path(x, z) :- path(x, y), edge(y, z).
twohop(x, z) :- path(x, y), path(y, z).
"""
    edges = [(1, 2), (2, 3), (3, 4)]
    closure = frozenset(transitive_closure(edges))
    result = run_uniform(text, {"edge": edges}, "CI", "BP")
    assert result.result_sets()["path"] == closure
    want = frozenset((a, c) for a, b in closure for b2, c in closure
                     if b == b2)
    assert result.result_sets()["twohop"] == want
