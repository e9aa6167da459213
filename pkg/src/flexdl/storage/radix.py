"""Radix tree representation (RX): comparison-free ordered index.

Keys are walked byte-wise (8-bit span) over their big-endian encoding
with path compression; equal-key duplicates share a terminal vector.
Iteration and prefix probes come out in key-byte order, which equals
key order because the encoding is order-preserving.
"""

from __future__ import annotations

from .core import RepConfig, RowStore, encode_key

_COMMON = bytes  # keys are bytes objects


class _RxNode:
    __slots__ = ("prefix", "children", "vec")

    def __init__(self, prefix: bytes = b""):
        self.prefix = prefix
        self.children: dict[int, _RxNode] | None = None
        self.vec: list | None = None


def _common_len(a: bytes, b: bytes) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


class RadixTreeRep:
    def __init__(self, config: RepConfig, arity: int, store: RowStore | None):
        self.config = config
        self.arity = arity
        self.store = store
        self.key = config.key
        self._root = _RxNode()
        self._count = 0

    def _encode(self, t) -> bytes:
        return encode_key(t, self.key)

    def _tuple_of(self, val):
        return val if self.store is None else self.store.get(val)

    # -- mutation -----------------------------------------------------------
    def bulk_load(self, tuples) -> None:
        if self.store is None:
            for t in tuples:
                self._insert(self._encode(t), t)
        else:
            for t in tuples:
                self._insert(self._encode(t), self.store.append(t))

    def bulk_load_refs(self, pairs) -> None:
        for t, ref in pairs:
            self._insert(self._encode(t), ref)

    def append(self, t) -> None:
        if self.store is None:
            self._insert(self._encode(t), t)
        else:
            self._insert(self._encode(t), self.store.append(t))

    def append_with_ref(self, t, ref) -> None:
        self._insert(self._encode(t), ref)

    def finished_append(self) -> None:
        pass

    def _insert(self, keyb: bytes, val) -> None:
        self._count += 1
        node = self._root
        i = 0
        while True:
            rest = keyb[i:]
            common = _common_len(rest, node.prefix)
            if common < len(node.prefix):
                # Split this node's compressed prefix.
                split = _RxNode(node.prefix[common + 1 :])
                split.children = node.children
                split.vec = node.vec
                node.children = {node.prefix[common]: split}
                node.vec = None
                node.prefix = node.prefix[:common]
            i += common
            if i == len(keyb):
                if node.vec is None:
                    node.vec = []
                node.vec.append(val)
                return
            byte = keyb[i]
            i += 1
            if node.children is None:
                node.children = {}
            child = node.children.get(byte)
            if child is None:
                child = _RxNode(keyb[i:])
                child.vec = [val]
                node.children[byte] = child
                return
            node = child

    def remove(self, t) -> bool:
        node = self._descend(self._encode(t))
        if node is None or node.vec is None:
            return False
        for i, val in enumerate(node.vec):
            if self._tuple_of(val) == t:
                del node.vec[i]
                if not node.vec:
                    node.vec = None
                self._count -= 1
                return True
        return False

    # -- lookup -------------------------------------------------------------
    def _descend(self, keyb: bytes) -> _RxNode | None:
        """Node whose root-path spells keyb exactly, or None."""
        node = self._root
        i = 0
        while True:
            rest = keyb[i:]
            if not rest.startswith(node.prefix):
                # A node prefix may extend beyond the probe bytes; the
                # caller handles partial descent via _descend_prefix.
                return None
            i += len(node.prefix)
            if i == len(keyb):
                return node
            if node.children is None:
                return None
            child = node.children.get(keyb[i])
            if child is None:
                return None
            node = child
            i += 1

    def contains(self, t) -> bool:
        node = self._descend(self._encode(t))
        if node is None or node.vec is None:
            return False
        if self.store is None:
            return t in node.vec
        get = self.store.get
        return any(get(v) == t for v in node.vec)

    def probe(self, values: tuple, prefix_len: int) -> list:
        from struct import pack

        keyb = b"".join(pack(">Q", v) for v in values)
        node = self._root
        i = 0
        while i < len(keyb):
            rest = keyb[i:]
            if len(node.prefix) >= len(rest):
                if not node.prefix.startswith(rest):
                    return []
                break
            if not rest.startswith(node.prefix):
                return []
            i += len(node.prefix)
            if i == len(keyb):
                break
            if node.children is None:
                return []
            child = node.children.get(keyb[i])
            if child is None:
                return []
            node = child
            i += 1
        out: list = []
        self._collect(node, out)
        return out

    def _collect(self, node: _RxNode, out: list) -> None:
        stack = [node]
        get = None if self.store is None else self.store.get
        while stack:
            n = stack.pop()
            if n.vec is not None:
                if get is None:
                    out.extend(n.vec)
                else:
                    out.extend(get(v) for v in n.vec)
            if n.children:
                for byte in sorted(n.children, reverse=True):
                    stack.append(n.children[byte])

    def iterate(self):
        out: list = []
        self._collect(self._root, out)
        return out

    def size(self) -> int:
        return self._count

    def memory_footprint(self) -> int:
        """Byte model: 16 header + compressed prefix bytes + 9 per child
        slot per node, plus 16 + entries * entry bytes per terminal vector
        (tuple bytes for CI, one ref otherwise)."""
        elem = 8 * self.arity if self.config.access == "CI" else 8
        total = 0
        stack = [self._root]
        while stack:
            n = stack.pop()
            total += 16 + len(n.prefix)
            if n.children:
                total += 9 * len(n.children)
                stack.extend(n.children.values())
            if n.vec is not None:
                total += 16 + len(n.vec) * elem
        return total
