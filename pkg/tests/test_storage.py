"""Behavioral suite for the physical representations.

Every supported access-type/structure combination goes through the same
paces: bulk load, tail appends, probes checked against a scan oracle,
duplicate tolerance, removal. Structure-specific contracts (SA tail
visibility, SAPP deferred dedup, HT load factor, row-store ref stability)
get their own tests.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexdl.errors import InvalidCombinationError, PrefixProbeUnsupportedError
from flexdl.storage import (
    CHUNK_BYTES,
    RepConfig,
    RowStore,
    check_key,
    create,
    encode_key,
    full_order,
    parse_key,
    render_key,
    table_combinations,
    valid_combination,
)
from flexdl.storage.core import probe_order

from conftest import ALL_COMBOS


def make_rep(access, ds, key, arity, node_capacity=16):
    """Build one representation plus its store when the access type needs
    one. FS takes no key."""
    cfg = RepConfig(access, ds, None if access == "FS" else key)
    if access in ("UKI", "UPI", "FS"):
        store = RowStore(arity)
        return create(cfg, arity, store, node_capacity=node_capacity), store
    return create(cfg, arity, node_capacity=node_capacity), None


def sort_attrs(access, ds, key, arity):
    """Attribute order the structure actually sorts by, or None when it
    keeps no order (HT, FS)."""
    if ds in ("HT", "RS"):
        return None
    cfg = RepConfig(access, ds, None if access == "FS" else key)
    return probe_order(cfg, arity)


# -- combination table ------------------------------------------------------


def test_combination_table():
    combos = table_combinations()
    assert len(combos) == 13
    assert ("FS", "RS") in combos
    for access in ("CI", "UKI", "UPI"):
        for ds in ("SA", "BP", "HT", "RX"):
            assert (access, ds) in combos
    assert not valid_combination("CI", "RS")
    assert not valid_combination("FS", "SA")
    assert valid_combination("CI", "SAPP")


def test_sapp_shares_the_sa_cell():
    # SAPP is a mode of the sorted array, not a 14th table entry.
    assert all(ds != "SAPP" for _, ds in table_combinations())
    rep, _ = make_rep("CI", "SAPP", (0,), 1)
    assert rep.deferred


def test_create_store_requirements():
    with pytest.raises(InvalidCombinationError):
        create(RepConfig("CI", "SA", (0,)), 1, RowStore(1))
    with pytest.raises(InvalidCombinationError):
        create(RepConfig("UKI", "BP", (0,)), 2)
    with pytest.raises(InvalidCombinationError):
        create(RepConfig("FS", "RS", None), 2)


def test_rep_config_validation():
    with pytest.raises(InvalidCombinationError):
        RepConfig("CI", "RS", (0,))
    with pytest.raises(InvalidCombinationError):
        RepConfig("FS", "RS", (0,))
    with pytest.raises(InvalidCombinationError):
        RepConfig("CI", "SA", None)
    with pytest.raises(InvalidCombinationError):
        RepConfig("ZZ", "SA", (0,))


def test_key_validation():
    check_key((1, 0), 2)
    with pytest.raises(InvalidCombinationError):
        check_key((0, 0), 2)
    with pytest.raises(InvalidCombinationError):
        check_key((2,), 2)
    with pytest.raises(InvalidCombinationError):
        check_key((), 2)


def test_key_rendering():
    assert render_key((0, 1)) == "0_1"
    assert render_key(None) == "-"
    assert parse_key("0_1") == (0, 1)
    assert parse_key("-") is None
    assert parse_key("2") == (2,)


def test_orders():
    assert full_order((1,), 3) == (1, 0, 2)
    assert full_order((2, 0), 3) == (2, 0, 1)
    assert probe_order(RepConfig("CI", "SA", (1,)), 3) == (1, 0, 2)
    assert probe_order(RepConfig("UPI", "BP", (1,)), 3) == (1, 0, 2)
    assert probe_order(RepConfig("UKI", "SA", (1,)), 3) == (1,)
    assert probe_order(RepConfig("CI", "RX", (1,)), 3) == (1,)


@given(
    st.lists(st.tuples(st.integers(0, 2**63 - 1), st.integers(0, 2**63 - 1)),
             min_size=2, max_size=20),
    st.sampled_from([(0,), (1,), (0, 1), (1, 0)]),
)
def test_encode_key_orders_like_projection(tuples, key):
    by_proj = sorted(tuples, key=lambda t: tuple(t[a] for a in key))
    by_bytes = sorted(tuples, key=lambda t: encode_key(t, key))
    assert [tuple(t[a] for a in key) for t in by_proj] == \
        [tuple(t[a] for a in key) for t in by_bytes]


# -- probe against the scan oracle ------------------------------------------


def scan_oracle(tuples, positions, values):
    return [t for t in tuples if all(t[a] == v for a, v in zip(positions, values))]


@pytest.mark.parametrize("access,ds", ALL_COMBOS)
def test_probe_matches_scan_oracle(access, ds):
    """probe(k) returns exactly the matching tuples (duplicates included),
    and ordered structures return them sorted by their physical order."""
    rng = random.Random(sum(map(ord, access + ds)))
    for trial in range(8):
        arity = rng.randint(1, 3)
        n = rng.randint(0, 60)
        tuples = [tuple(rng.randint(0, 4) for _ in range(arity))
                  for _ in range(n)]
        key = (0,) if arity == 1 else tuple(
            rng.sample(range(arity), rng.randint(1, arity)))
        rep, _ = make_rep(access, ds, key, arity)
        rep.bulk_load(tuples)
        extra = [tuple(rng.randint(0, 4) for _ in range(arity))
                 for _ in range(rng.randint(0, 10))]
        for t in extra:
            rep.append(t)
        rep.finished_append()
        everything = tuples + extra
        if ds == "SAPP":
            everything = sorted(set(everything))

        if access == "FS":
            porder = tuple(range(arity))
            plens = range(1, arity + 1)
        elif ds == "HT":
            porder = key
            plens = [len(key)]
        else:
            porder = sort_attrs(access, ds, key, arity)
            plens = range(1, len(porder) + 1)
        for plen in plens:
            positions = porder[:plen]
            probe_vals = tuple(rng.randint(0, 4) for _ in positions)
            got = list(rep.probe(probe_vals, plen))
            want = scan_oracle(everything, positions, probe_vals)
            assert sorted(got) == sorted(want), (access, ds, key, plen)
            order = sort_attrs(access, ds, key, arity)
            if order is not None:
                projs = [tuple(t[a] for a in order) for t in got]
                assert projs == sorted(projs)


def test_ht_rejects_prefix_probe():
    rep, _ = make_rep("CI", "HT", (0, 1), 2)
    rep.bulk_load([(1, 2)])
    with pytest.raises(PrefixProbeUnsupportedError):
        rep.probe((1,), 1)
    assert rep.probe((1, 2), 2) == [(1, 2)]


# -- duplicates and removal -------------------------------------------------


@pytest.mark.parametrize("access,ds", ALL_COMBOS)
def test_duplicates_survive_until_removed(access, ds):
    """Structures tolerate duplicate tuples; dedup is the caller's job.
    SAPP is the exception by design: finished_append uniques the array."""
    rep, _ = make_rep(access, ds, (0,), 2)
    rep.bulk_load([(1, 5), (1, 5), (2, 6)])
    rep.finished_append()
    if ds == "SAPP":
        assert sorted(rep.iterate()) == [(1, 5), (2, 6)]
        return
    assert sorted(rep.iterate()) == [(1, 5), (1, 5), (2, 6)]
    assert rep.size() == 3
    assert rep.remove((1, 5))
    assert rep.contains((1, 5))
    assert sorted(rep.iterate()) == [(1, 5), (2, 6)]
    assert rep.remove((1, 5))
    assert not rep.contains((1, 5))
    assert not rep.remove((1, 5))
    assert rep.size() == 1


@pytest.mark.parametrize("access,ds", ALL_COMBOS)
def test_empty_representation(access, ds):
    rep, _ = make_rep(access, ds, (0,), 2)
    rep.finished_append()
    assert not rep.contains((1, 2))
    assert list(rep.iterate()) == []
    assert rep.size() == 0
    if ds == "HT":
        assert rep.probe((1,), 1) == []
    else:
        assert list(rep.probe((1,), 1)) == []


# -- sorted array tail semantics --------------------------------------------


def test_sa_tail_is_visible_to_contains():
    rep, _ = make_rep("CI", "SA", (0,), 1)
    rep.bulk_load([(1,)])
    rep.append((2,))
    assert rep.contains((2,))
    assert rep.contains((1,))


def test_sapp_tail_is_invisible_to_contains():
    rep, _ = make_rep("CI", "SAPP", (0,), 1)
    rep.bulk_load([(1,)])
    rep.append((2,))
    assert not rep.contains((2,))
    assert rep.contains((1,))
    rep.finished_append()
    assert rep.contains((2,))


def test_sapp_dedups_on_finish():
    rep, _ = make_rep("CI", "SAPP", (0,), 1)
    for v in (5, 3, 5, 3):
        rep.append((v,))
    rep.finished_append()
    assert list(rep.iterate()) == [(3,), (5,)]


def test_sa_keeps_duplicates_on_finish():
    rep, _ = make_rep("CI", "SA", (0,), 1)
    for v in (5, 3, 5, 3):
        rep.append((v,))
    rep.finished_append()
    assert list(rep.iterate()) == [(3,), (3,), (5,), (5,)]


@given(st.lists(st.lists(st.integers(0, 9), max_size=30), min_size=1,
                max_size=4))
@settings(max_examples=60, deadline=None)
def test_sapp_sorted_and_unique_after_every_finish(rounds):
    """Append/finish cycles may repeat; each finish leaves the array sorted
    and duplicate-free, including against earlier rounds."""
    rep, _ = make_rep("CI", "SAPP", (0,), 1)
    seen = set()
    for round_vals in rounds:
        for v in round_vals:
            rep.append((v,))
            seen.add((v,))
        rep.finished_append()
        assert list(rep.iterate()) == sorted(seen)


@given(st.lists(st.integers(0, 6), max_size=40),
       st.lists(st.integers(0, 6), max_size=15))
@settings(max_examples=60, deadline=None)
def test_sa_contains_covers_sorted_and_tail(loaded, appended):
    rep, _ = make_rep("CI", "SA", (0,), 1)
    rep.bulk_load([(v,) for v in loaded])
    for v in appended:
        rep.append((v,))
    members = {(v,) for v in loaded} | {(v,) for v in appended}
    for v in range(7):
        assert rep.contains((v,)) == ((v,) in members)


# -- hash table load factor -------------------------------------------------


@given(st.lists(st.tuples(st.sampled_from("abr"), st.integers(0, 30)),
                max_size=80))
@settings(max_examples=60, deadline=None)
def test_ht_load_factor_stays_at_most_half(ops):
    rep, _ = make_rep("CI", "HT", (0,), 2)
    assert rep.load_factor <= 0.5
    for op, v in ops:
        if op == "a":
            rep.append((v, v + 1))
        elif op == "b":
            rep.bulk_load([(v, v + 1), (v + 1, v)])
        else:
            rep.remove((v, v + 1))
        assert rep.load_factor <= 0.5


# -- row store --------------------------------------------------------------


def test_tuple_refs_survive_appends():
    store = RowStore(2)
    ref = store.append((7, 8))
    for i in range(50_000):
        store.append((i, i))
    assert store.get(ref) == (7, 8)


def test_row_store_remove_tombstones():
    store = RowStore(1)
    refs = store.extend([(1,), (2,), (3,)])
    store.remove(refs[1])
    assert store.size() == 2
    assert list(store.iterate()) == [(1,), (3,)]
    assert store.get(refs[1]) is None
    store.remove(refs[1])  # idempotent
    assert store.size() == 2


def test_row_store_chunked_footprint():
    store = RowStore(2)
    assert store.memory_footprint() == 0
    store.append((0, 0))
    assert store.memory_footprint() == CHUNK_BYTES
    per_chunk = CHUNK_BYTES // 16
    store.extend([(i, i) for i in range(per_chunk)])
    assert store.memory_footprint() == 2 * CHUNK_BYTES


# -- memory accounting ------------------------------------------------------


def test_ci_sa_footprint_is_chunked_capacity():
    rep, _ = make_rep("CI", "SA", (0,), 2)
    rep.bulk_load([(i, i) for i in range(1000)])
    # 1000 tuples * 16 bytes rounds up to a single 2 MiB chunk.
    assert rep.memory_footprint() == CHUNK_BYTES


def test_uki_entry_is_key_plus_ref():
    ci, _ = make_rep("CI", "SA", (0,), 4)
    uki, _ = make_rep("UKI", "SA", (0,), 4)
    per_chunk_ci = CHUNK_BYTES // (8 * 4)
    n = per_chunk_ci + 1
    data = [(i, i, i, i) for i in range(n)]
    ci.bulk_load(data)
    uki.bulk_load(data)
    # 32 B/entry spills into a second chunk; 16 B/entry does not.
    assert ci.memory_footprint() == 2 * CHUNK_BYTES
    assert uki.memory_footprint() == CHUNK_BYTES


def test_fs_reports_zero_index_bytes():
    rep, store = make_rep("FS", "RS", None, 2)
    rep.bulk_load([(1, 2), (3, 4)])
    assert rep.memory_footprint() == 0
    assert store.memory_footprint() == CHUNK_BYTES


# -- btree node capacity ----------------------------------------------------


def test_btree_respects_node_capacity():
    rep, _ = make_rep("CI", "BP", (0,), 1, node_capacity=4)
    rep.bulk_load([(i,) for i in range(100)])
    assert sorted(rep.iterate()) == [(i,) for i in range(100)]
    assert all(rep.contains((i,)) for i in range(100))
    with pytest.raises(InvalidCombinationError):
        make_rep("CI", "BP", (0,), 1, node_capacity=1)
