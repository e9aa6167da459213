"""Full-scan access (FS) over a row store (RS).

No index: probes are predicate scans carrying explicit attribute
positions, so any bound-attribute combination works. Iteration follows
store insertion order.
"""

from __future__ import annotations

from .core import RepConfig, RowStore


class FullScanRep:
    def __init__(self, config: RepConfig, arity: int, store: RowStore):
        self.config = config
        self.arity = arity
        self.store = store

    # -- mutation -----------------------------------------------------------
    def bulk_load(self, tuples) -> None:
        for t in tuples:
            self.store.append(t)

    def bulk_load_refs(self, pairs) -> None:
        pass  # tuples already live in the shared store

    def append(self, t) -> None:
        self.store.append(t)

    def append_with_ref(self, t, ref) -> None:
        pass

    def finished_append(self) -> None:
        pass

    def remove(self, t) -> bool:
        for ref in self.store.refs():
            if self.store.get(ref) == t:
                self.store.remove(ref)
                return True
        return False

    # -- lookup -------------------------------------------------------------
    def contains(self, t) -> bool:
        for s in self.store.iterate():
            if s == t:
                return True
        return False

    def probe_scan(self, positions: tuple[int, ...], values: tuple) -> list:
        """Scan with an equality predicate over (positions, values)."""
        if len(positions) == 1:
            a = positions[0]
            v = values[0]
            return [t for t in self.store.iterate() if t[a] == v]
        pairs = tuple(zip(positions, values))
        return [
            t for t in self.store.iterate() if all(t[a] == v for a, v in pairs)
        ]

    def probe(self, values: tuple, prefix_len: int) -> list:
        # Positional probe for interface parity: attributes 0..prefix_len-1.
        return self.probe_scan(tuple(range(prefix_len)), values)

    def iterate(self):
        return list(self.store.iterate())

    def size(self) -> int:
        return self.store.size()

    def memory_footprint(self) -> int:
        """The scan itself holds nothing; the shared store reports its own
        chunk bytes separately."""
        return 0
