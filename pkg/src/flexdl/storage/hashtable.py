"""Hash table representation (HT): unordered multimap over the full key.

Keys hash on their 8-byte-per-attribute encoding; duplicates sit in a
growable vector per key. The slot table is open-addressed and doubles
whenever occupancy would exceed half the capacity, so the load factor
stays at or below 0.5 after every operation. Range or prefix probes are
unsupported by construction.
"""

from __future__ import annotations

from ..errors import PrefixProbeUnsupportedError
from .core import RepConfig, RowStore, make_projector

INITIAL_CAPACITY = 16


class HashTableRep:
    def __init__(self, config: RepConfig, arity: int, store: RowStore | None):
        self.config = config
        self.arity = arity
        self.store = store
        self.key = config.key
        self._proj = make_projector(self.key)
        # Vector-per-key map; occupancy and capacity model the slot table.
        self._map: dict[tuple, list] = {}
        self._capacity = INITIAL_CAPACITY
        self._count = 0

    def _grow(self) -> None:
        while 2 * len(self._map) > self._capacity:
            self._capacity *= 2

    @property
    def load_factor(self) -> float:
        return len(self._map) / self._capacity

    def _tuple_of(self, val):
        return val if self.store is None else self.store.get(val)

    # -- mutation -----------------------------------------------------------
    def bulk_load(self, tuples) -> None:
        setdefault = self._map.setdefault
        if self.store is None:
            for t in tuples:
                setdefault(self._proj(t), []).append(t)
                self._count += 1
        else:
            append = self.store.append
            for t in tuples:
                setdefault(self._proj(t), []).append(append(t))
                self._count += 1
        self._grow()

    def bulk_load_refs(self, pairs) -> None:
        setdefault = self._map.setdefault
        for t, ref in pairs:
            setdefault(self._proj(t), []).append(ref)
            self._count += 1
        self._grow()

    def append(self, t) -> None:
        if self.store is None:
            val = t
        else:
            val = self.store.append(t)
        self._map.setdefault(self._proj(t), []).append(val)
        self._count += 1
        self._grow()

    def append_with_ref(self, t, ref) -> None:
        self._map.setdefault(self._proj(t), []).append(ref)
        self._count += 1
        self._grow()

    def finished_append(self) -> None:
        pass

    def remove(self, t) -> bool:
        k = self._proj(t)
        vec = self._map.get(k)
        if vec is None:
            return False
        for i, val in enumerate(vec):
            if self._tuple_of(val) == t:
                del vec[i]
                if not vec:
                    del self._map[k]
                self._count -= 1
                return True
        return False

    # -- lookup -------------------------------------------------------------
    def contains(self, t) -> bool:
        vec = self._map.get(self._proj(t))
        if vec is None:
            return False
        if self.store is None:
            return t in vec
        get = self.store.get
        return any(get(v) == t for v in vec)

    def probe(self, values: tuple, prefix_len: int) -> list:
        if prefix_len != len(self.key):
            raise PrefixProbeUnsupportedError(
                f"hash table keyed {self.key} cannot answer a "
                f"{prefix_len}-attribute prefix probe"
            )
        vec = self._map.get(tuple(values))
        if vec is None:
            return []
        if self.store is None:
            return list(vec)
        get = self.store.get
        return [get(v) for v in vec]

    def iterate(self):
        out = []
        if self.store is None:
            for vec in self._map.values():
                out.extend(vec)
        else:
            get = self.store.get
            for vec in self._map.values():
                out.extend(get(v) for v in vec)
        return out

    def size(self) -> int:
        return self._count

    def memory_footprint(self) -> int:
        """Byte model: capacity * (key bytes + vector pointer) for the slot
        table (UPI slots hold a bare ref), plus 16 + entries * entry bytes
        per occupied vector."""
        if self.config.access == "CI":
            slot = 8 * len(self.key) + 8
            elem = 8 * self.arity
        elif self.config.access == "UKI":
            slot = 8 * len(self.key) + 8
            elem = 8
        else:
            slot = 16
            elem = 8
        total = self._capacity * slot
        for vec in self._map.values():
            total += 16 + len(vec) * elem
        return total
