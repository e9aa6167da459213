"""B+-tree representation (BP): ordered multiset with linked leaves.

Point inserts apply immediately (finished_append is a no-op). Covered
indexes store tuples ordered by the key permutation; unclustered variants
store refs, keyed explicitly (UKI) or compared through the store (UPI).
Node capacity is tunable; the default keeps a node around 256 bytes in
the byte model.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

from ..errors import InvalidCombinationError
from .core import RepConfig, RowStore, full_order, make_projector

DEFAULT_NODE_CAPACITY = 16


class _Leaf:
    __slots__ = ("keys", "vals", "next")

    def __init__(self):
        self.keys: list = []
        self.vals: list = []
        self.next: _Leaf | None = None


class _Inner:
    __slots__ = ("keys", "children")

    def __init__(self):
        self.keys: list = []      # separator sort keys
        self.children: list = []


class BTreeRep:
    def __init__(
        self,
        config: RepConfig,
        arity: int,
        store: RowStore | None,
        node_capacity: int = DEFAULT_NODE_CAPACITY,
    ):
        if node_capacity < 2:
            raise InvalidCombinationError(
                f"node capacity {node_capacity} cannot hold a split")
        self.config = config
        self.arity = arity
        self.store = store
        self.key = config.key
        self.capacity = node_capacity
        order = full_order(self.key, arity)
        full_proj = make_projector(order)
        if config.access == "CI":
            self._sk_of_tuple = full_proj
        elif config.access == "UKI":
            self._sk_of_tuple = make_projector(self.key)
        else:  # UPI
            get = store.get
            self._sk_of_tuple = lambda t, _p=full_proj: _p(t)
        self._root: _Leaf | _Inner = _Leaf()
        self._first: _Leaf = self._root
        self._count = 0

    def _val_for(self, t, ref):
        return t if self.store is None else ref

    def _tuple_of(self, val):
        return val if self.store is None else self.store.get(val)

    # -- mutation -----------------------------------------------------------
    def bulk_load(self, tuples) -> None:
        if self.store is None:
            pairs = [(self._sk_of_tuple(t), t) for t in tuples]
        else:
            pairs = [
                (self._sk_of_tuple(t), self.store.append(t)) for t in tuples
            ]
        self._bulk_pairs(pairs)

    def bulk_load_refs(self, pairs) -> None:
        self._bulk_pairs([(self._sk_of_tuple(t), ref) for t, ref in pairs])

    def _bulk_pairs(self, pairs) -> None:
        if self._count:
            for sk, val in pairs:
                self._insert(sk, val)
            return
        pairs.sort(key=lambda p: p[0])
        cap = self.capacity
        leaves: list[_Leaf] = []
        for i in range(0, len(pairs), cap):
            leaf = _Leaf()
            block = pairs[i : i + cap]
            leaf.keys = [p[0] for p in block]
            leaf.vals = [p[1] for p in block]
            if leaves:
                leaves[-1].next = leaf
            leaves.append(leaf)
        if not leaves:
            return
        self._first = leaves[0]
        self._count = len(pairs)
        level: list = leaves
        while len(level) > 1:
            parents: list = []
            for i in range(0, len(level), cap):
                inner = _Inner()
                block = level[i : i + cap]
                inner.children = block
                inner.keys = [self._min_key(c) for c in block[1:]]
                parents.append(inner)
            level = parents
        self._root = level[0]

    def _min_key(self, node):
        while isinstance(node, _Inner):
            node = node.children[0]
        return node.keys[0]

    def append(self, t) -> None:
        if self.store is None:
            self._insert(self._sk_of_tuple(t), t)
        else:
            self.append_with_ref(t, self.store.append(t))

    def append_with_ref(self, t, ref) -> None:
        self._insert(self._sk_of_tuple(t), ref)

    def finished_append(self) -> None:
        pass

    def _insert(self, sk, val) -> None:
        self._count += 1
        path: list[tuple[_Inner, int]] = []
        node = self._root
        while isinstance(node, _Inner):
            i = bisect_right(node.keys, sk)
            path.append((node, i))
            node = node.children[i]
        i = bisect_right(node.keys, sk)
        node.keys.insert(i, sk)
        node.vals.insert(i, val)
        if len(node.keys) <= self.capacity:
            return
        # Split up the path.
        mid = len(node.keys) // 2
        right = _Leaf()
        right.keys = node.keys[mid:]
        right.vals = node.vals[mid:]
        node.keys = node.keys[:mid]
        node.vals = node.vals[:mid]
        right.next = node.next
        node.next = right
        push_key = right.keys[0]
        child: _Leaf | _Inner = right
        while path:
            parent, idx = path.pop()
            parent.keys.insert(idx, push_key)
            parent.children.insert(idx + 1, child)
            if len(parent.children) <= self.capacity:
                return
            mid = len(parent.keys) // 2
            push_key = parent.keys[mid]
            sibling = _Inner()
            sibling.keys = parent.keys[mid + 1 :]
            sibling.children = parent.children[mid + 1 :]
            parent.keys = parent.keys[:mid]
            parent.children = parent.children[: mid + 1]
            child = sibling
        new_root = _Inner()
        new_root.keys = [push_key]
        new_root.children = [self._root, child]
        self._root = new_root

    def remove(self, t) -> bool:
        """Remove one occurrence; leaves may underflow (no rebalancing),
        which preserves the ordered-multiset contract."""
        sk = self._sk_of_tuple(t)
        leaf = self._leaf_for(sk)
        while leaf is not None:
            i = bisect_left(leaf.keys, sk)
            while i < len(leaf.keys) and leaf.keys[i] == sk:
                if self._tuple_of(leaf.vals[i]) == t:
                    del leaf.keys[i]
                    del leaf.vals[i]
                    self._count -= 1
                    return True
                i += 1
            if i < len(leaf.keys):
                return False
            leaf = leaf.next
        return False

    # -- lookup -------------------------------------------------------------
    def _leaf_for(self, sk) -> _Leaf:
        # Equal sort keys can sit on both sides of a separator (splits cut
        # runs anywhere), so descend left of equal separators to reach the
        # first leaf that can hold sk.
        node = self._root
        while isinstance(node, _Inner):
            node = node.children[bisect_left(node.keys, sk)]
        return node

    def contains(self, t) -> bool:
        sk = self._sk_of_tuple(t)
        leaf = self._leaf_for(sk)
        clustered = self.store is None
        while leaf is not None:
            keys = leaf.keys
            n = len(keys)
            i = bisect_left(keys, sk)
            if clustered:
                # The sort key is the whole permuted tuple, so one probe of
                # the leaf answers membership.
                if i < n:
                    return keys[i] == sk
            else:
                while i < n:
                    if keys[i] != sk:
                        return False
                    if self._tuple_of(leaf.vals[i]) == t:
                        return True
                    i += 1
            # Leaf exhausted without passing sk; the run may continue.
            leaf = leaf.next
        return False

    def probe(self, values: tuple, prefix_len: int) -> list:
        """Range scan over the key prefix, in key order. Leaf contents are
        copied out range-wise (bisect for the bounds, slice for the data)."""
        lo_key = tuple(values)
        hi_key = lo_key[:-1] + (lo_key[-1] + 1,)
        leaf = self._leaf_for(lo_key)
        out = []
        get = None if self.store is None else self.store.get
        i = bisect_left(leaf.keys, lo_key)
        while leaf is not None:
            keys = leaf.keys
            n = len(keys)
            j = bisect_left(keys, hi_key, i)
            if j > i:
                block = leaf.vals[i:j]
                if get is None:
                    out.extend(block)
                else:
                    out.extend([get(v) for v in block])
            if j < n:
                return out
            leaf = leaf.next
            i = 0
        return out

    def iterate(self):
        out = []
        get = None if self.store is None else self.store.get
        leaf = self._first
        while leaf is not None:
            if get is None:
                out.extend(leaf.vals)
            else:
                out.extend(get(v) for v in leaf.vals)
            leaf = leaf.next
        return out

    def size(self) -> int:
        return self._count

    def memory_footprint(self) -> int:
        """Byte model: per leaf, entries * entry bytes + 16 header; per inner,
        separators * key bytes + child pointers * 8 + 16 header."""
        if self.config.access == "CI":
            entry = 8 * self.arity
            keyb = 8 * self.arity
        elif self.config.access == "UKI":
            entry = 8 * len(self.key) + 8
            keyb = 8 * len(self.key)
        else:
            entry = 8
            keyb = 8
        total = 0
        stack = [self._root]
        while stack:
            node = stack.pop()
            if isinstance(node, _Inner):
                total += 16 + len(node.keys) * keyb + len(node.children) * 8
                stack.extend(node.children)
            else:
                total += 16 + len(node.keys) * entry
        return total
