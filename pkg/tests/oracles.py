"""Reference implementations the test suite checks the engine against.

Each oracle computes its result by a different algorithm than the engine
(graph searches and worklists instead of joins over indexes), so agreement
between the two is meaningful.
"""

from collections import defaultdict, deque


def reachable_undirected(edges, seeds):
    """Nodes reachable from any seed following edges in either direction.
    Matches the corpus reachability program: seeds are reachable, and
    reachability spreads across an edge regardless of its direction."""
    adj = defaultdict(list)
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = set()
    for s in seeds:
        seen.add(s[0] if isinstance(s, tuple) else s)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return {(v,) for v in seen}


def transitive_closure(edges):
    """All (x, y) with a directed path of length >= 1, by BFS per source."""
    adj = defaultdict(list)
    nodes = set()
    for u, v in edges:
        adj[u].append(v)
        nodes.add(u)
        nodes.add(v)
    closure = set()
    for src in nodes:
        seen = set(adj[src])
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            closure.add((src, u))
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return closure


def same_generation(edges):
    """Pairs (x, y) whose members sit at the same depth below a common
    ancestor: seeded by sibling pairs, closed under stepping both sides down
    one edge (a search over the product graph)."""
    children = defaultdict(list)
    for u, v in set(edges):
        children[u].append(v)
    found = set()
    queue = deque()
    for kids in children.values():
        for x in kids:
            for y in kids:
                if (x, y) not in found:
                    found.add((x, y))
                    queue.append((x, y))
    while queue:
        a, b = queue.popleft()
        for x in children.get(a, ()):
            for y in children.get(b, ()):
                if (x, y) not in found:
                    found.add((x, y))
                    queue.append((x, y))
    return found


def andersen_points_to(address_of, assign, load, store):
    """Worklist solver for the inclusion-based pointer analysis program."""
    pts = defaultdict(set)
    for x, y in address_of:
        pts[x].add(y)
    assign = list(set(assign))
    load = list(set(load))
    store = list(set(store))
    changed = True
    while changed:
        changed = False
        for x, z in assign:
            add = pts[z] - pts[x]
            if add:
                pts[x] |= add
                changed = True
        for x, z in load:
            # points_to(x, y) :- load(x, z), points_to(z, w), points_to(w, y)
            add = set()
            for w in pts[z]:
                add |= pts[w]
            if not add <= pts[x]:
                pts[x] |= add
                changed = True
        for v, x in store:
            # points_to(w, y) :- store(v, x), points_to(v, w), points_to(x, y)
            for w in pts[v]:
                if not pts[x] <= pts[w]:
                    pts[w] |= pts[x]
                    changed = True
    return {(x, y) for x, ys in pts.items() for y in ys}


def nested_loop_join(r, s, r_pos, s_pos):
    """All combined tuples of r x s agreeing on the given attribute pair."""
    out = []
    for rt in r:
        for st in s:
            if rt[r_pos] == st[s_pos]:
                out.append(rt + st)
    return out
