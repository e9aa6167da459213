"""Synthetic workload generators.

Every generator is a pure function of its parameters and seed: calling it
twice returns equal data. Sizes given in bytes assume 8 bytes per attribute.
"""

from __future__ import annotations

import math
import random

from ..errors import IoError, ParseError

Tuples = list[tuple[int, ...]]


def gen_dense_shuffled(n: int, arity: int = 1, multiplicity: int = 1,
                       seed: int = 0) -> Tuples:
    """Dense keys shuffled into random order.

    Tuple k carries key k // multiplicity in its first attribute, so keys
    cover [0, ceil(n/multiplicity)) with up to `multiplicity` occurrences
    each. At arity 1 duplicates are exact; wider tuples get a distinct
    second attribute per occurrence, remaining attributes repeat the key.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    out: Tuples = []
    for k in range(n):
        key = k // multiplicity
        if arity == 1:
            out.append((key,))
        else:
            rest = (key,) * (arity - 2)
            out.append((key, k % multiplicity) + rest)
    random.Random(seed).shuffle(out)
    return out


def gen_probe_pair(r_bytes: int, s_bytes: int, partners_per_tuple: int = 2,
                   seed: int = 0) -> tuple[Tuples, Tuples]:
    """Outer relation R and inner relation S of 2-attribute tuples where
    every R tuple joins exactly `partners_per_tuple` S tuples on R.1 = S.0.

    With zero partners the two relations reference disjoint key ranges and
    the join is empty. Sizes are raw-tuple bytes (16 B per tuple).
    """
    if partners_per_tuple < 0:
        raise ValueError("partners_per_tuple must be >= 0")
    nr = r_bytes // 16
    ns = s_bytes // 16
    rng = random.Random(seed)
    if partners_per_tuple == 0:
        r = [(i, i) for i in range(nr)]
        s = [(nr + j, j) for j in range(ns)]
    else:
        nkeys = max(1, ns // partners_per_tuple)
        s = [(k, k * partners_per_tuple + j)
             for k in range(nkeys) for j in range(partners_per_tuple)]
        r = [(i, rng.randrange(nkeys)) for i in range(nr)]
    rng.shuffle(r)
    rng.shuffle(s)

    # Counting pass: the partner promise is part of the contract.
    from collections import Counter
    per_key = Counter(t[0] for t in s)
    for _, k in r:
        if per_key.get(k, 0) != partners_per_tuple:
            raise AssertionError("partner count violated")
    return r, s


INTERWEAVING_PROGRAM = """\
% Four rules sharing one wide inner relation, each binding a different
% permuted prefix of its attributes.
.decl r1/1 .edb
.decl r2/2 .edb
.decl r3/3 .edb
.decl r4/4 .edb
.decl s/8 .edb
.decl out1/1 .idb
.decl out2/1 .idb
.decl out3/1 .idb
.decl out4/1 .idb

out1(a) :- r1(a), s(a, b, c, d, e, f, g, h).
out2(a) :- r2(b, a), s(a, b, c, d, e, f, g, h).
out3(a) :- r3(c, a, b), s(a, b, c, d, e, f, g, h).
out4(a) :- r4(d, b, c, a), s(a, b, c, d, e, f, g, h).
"""

# Sort orders the four bodies induce on s, widest first. The single-key
# sharing variant collapses all four to the plain ascending prefix.
INTERWEAVING_KEYS = {
    1: [(0, 1, 2, 3)],
    2: [(0, 1, 2, 3), (2, 0, 1)],
    3: [(0, 1, 2, 3), (2, 0, 1), (1, 0)],
    4: [(3, 1, 2, 0), (2, 0, 1), (1, 0), (0,)],
}


def gen_interweaving(multiplicity: int = 1, seed: int = 0,
                     scale: float = 1.0) -> dict[str, Tuples]:
    """Facts for the shared-inner-relation program.

    Each r_i holds one tuple per distinct s key prefix, arranged in that
    rule's delivery order, so every r_i tuple joins exactly `multiplicity`
    s tuples. The four prefix attributes encode the prefix id disjointly
    (4i, 4i+1, 4i+2, 4i+3), keeping every bound attribute set unique per
    prefix.
    """
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    prefixes = max(1, round(1_000_000 * scale))
    rng = random.Random(seed)
    s: Tuples = []
    for i in range(prefixes):
        a, b, c, d = 4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3
        for j in range(multiplicity):
            tail = 4 * prefixes + i * multiplicity + j
            s.append((a, b, c, d, tail, tail + 1, tail + 2, tail + 3))
    r1 = [(4 * i,) for i in range(prefixes)]
    r2 = [(4 * i + 1, 4 * i) for i in range(prefixes)]
    r3 = [(4 * i + 2, 4 * i, 4 * i + 1) for i in range(prefixes)]
    r4 = [(4 * i + 3, 4 * i + 1, 4 * i + 2, 4 * i) for i in range(prefixes)]
    for rel in (s, r1, r2, r3, r4):
        rng.shuffle(rel)
    return {"r1": r1, "r2": r2, "r3": r3, "r4": r4, "s": s}


def gen_buildup_stream(base_n: int, found_n: int, new_fraction: float = 1.0,
                       dup_multiplicity: int = 1, ordered: bool = True,
                       seed: int = 0) -> tuple[Tuples, Tuples]:
    """Base contents plus a found-fact stream for strategy experiments.

    Base tuples live on even keys; the stream draws a new_fraction share of
    its distinct keys from fresh odd keys and the rest from the base, each
    repeated dup_multiplicity times, in ascending or shuffled order.
    """
    if not 0.0 <= new_fraction <= 1.0:
        raise ValueError("new_fraction must be within [0, 1]")
    if dup_multiplicity < 1:
        raise ValueError("dup_multiplicity must be >= 1")
    rng = random.Random(seed)
    base = [(2 * k, 2 * k) for k in range(base_n)]
    distinct = max(1, found_n // dup_multiplicity) if found_n else 0
    n_new = round(distinct * new_fraction)
    n_old = distinct - n_new
    if n_old > base_n:
        raise ValueError("not enough base tuples for the contained share")
    keys = [2 * k + 1 for k in range(n_new)]
    keys += [2 * k for k in rng.sample(range(base_n), n_old)] if n_old else []
    stream: Tuples = []
    for key in keys:
        stream.extend([(key, key)] * dup_multiplicity)
    stream = stream[:found_n] if found_n else []
    if ordered:
        stream.sort()
    else:
        rng.shuffle(stream)
    return base, stream


def gen_random_graph(n: int, p: float | None = None, m: int | None = None,
                     seed: int = 0) -> Tuples:
    """Directed random graph: distinct edges, no self-loops.

    Exactly one of p (independent edge probability, skip-sampled) or m
    (exact edge count) must be given. Deterministic per seed.
    """
    if (p is None) == (m is None):
        raise ValueError("give exactly one of p or m")
    if n < 0:
        raise ValueError("n must be >= 0")
    space = n * (n - 1)
    rng = random.Random(seed)

    def unrank(idx: int) -> tuple[int, int]:
        u, r = divmod(idx, n - 1)
        return u, r + (r >= u)

    if m is not None:
        if m > space:
            raise ValueError("m exceeds the number of possible edges")
        return [unrank(i) for i in sorted(rng.sample(range(space), m))]
    if p <= 0.0 or space == 0:
        return []
    if p >= 1.0:
        return [unrank(i) for i in range(space)]
    # Geometric gap sampling of a Bernoulli(p) process over edge ranks.
    edges: Tuples = []
    log_q = math.log1p(-p)
    idx = -1
    while True:
        gap = int(math.log(1.0 - rng.random()) / log_q) + 1
        idx += gap
        if idx >= space:
            break
        edges.append(unrank(idx))
    return edges


def load_edge_list(path: str) -> Tuples:
    """Edge tuples from a whitespace-separated integer pair file.

    Lines starting with '#' (after optional whitespace) are comments.
    """
    edges: Tuples = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ParseError("expected two integers per line",
                                     lineno, path)
                try:
                    u, v = int(parts[0]), int(parts[1])
                except ValueError:
                    raise ParseError(f"bad integer in {line!r}", lineno, path)
                if u < 0 or v < 0:
                    raise ParseError("vertex ids must be unsigned",
                                     lineno, path)
                edges.append((u, v))
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    return edges
