"""Sorted array representation (SA) and its deferred-dedup variant (SA++).

Entries live in a sorted area plus an unsorted tail that collects appends.
finished_append folds the tail in. SA keeps duplicates and answers
contains against both areas; SA++ checks the sorted area only while a
sequence is open (appended duplicates slip through) and deduplicates the
whole array when the sequence ends.
"""

from __future__ import annotations

from bisect import bisect_left

from .core import CHUNK_BYTES, RepConfig, RowStore, full_order, make_projector


class SortedArrayRep:
    def __init__(self, config: RepConfig, arity: int, store: RowStore | None):
        self.config = config
        self.arity = arity
        self.store = store
        self.deferred = config.ds == "SAPP"
        self.key = config.key
        order = full_order(self.key, arity)
        if config.access == "CI":
            self._sort_proj = make_projector(order)
        elif config.access == "UKI":
            self._sort_proj = make_projector(self.key)
        else:  # UPI: order by the dereferenced full permutation
            proj = make_projector(order)
            get = store.get
            self._sort_proj = lambda t: proj(t)
            self._deref_key = lambda ref: proj(get(ref))
        self._keys: list = []   # sort keys (CI: full permutation, UKI: key attrs)
        self._vals: list = []   # CI: tuples, UKI/UPI: refs (UPI keeps keys empty)
        self._tail_keys: list = []
        self._tail_vals: list = []
        self._capacity_bytes = 0

    # -- byte model ---------------------------------------------------------
    def _entry_bytes(self) -> int:
        if self.config.access == "CI":
            return 8 * self.arity
        if self.config.access == "UKI":
            return 8 * len(self.key) + 8
        return 8  # UPI: bare reference

    def _grow_to(self, entries: int, exact: bool) -> None:
        need = entries * self._entry_bytes()
        if need <= self._capacity_bytes:
            return
        if exact:
            chunks = -(-need // CHUNK_BYTES)
            self._capacity_bytes = chunks * CHUNK_BYTES
        else:
            while self._capacity_bytes < need:
                self._capacity_bytes += CHUNK_BYTES

    # -- mutation -----------------------------------------------------------
    def bulk_load(self, tuples) -> None:
        if self.store is None:
            for t in tuples:
                self._tail_keys.append(self._sort_proj(t))
                self._tail_vals.append(t)
        else:
            for t in tuples:
                self._load_ref(t, self.store.append(t))
        self._fold_tail(dedup=False)
        self._grow_to(len(self._vals), exact=True)

    def bulk_load_refs(self, pairs) -> None:
        """Index pre-existing (tuple, ref) pairs; the store is untouched."""
        for t, ref in pairs:
            self._load_ref(t, ref)
        self._fold_tail(dedup=False)
        self._grow_to(len(self._vals), exact=True)

    def _load_ref(self, t, ref) -> None:
        if self.config.access == "UKI":
            self._tail_keys.append(self._sort_proj(t))
        self._tail_vals.append(ref)

    def append(self, t) -> None:
        if self.store is None:
            self._append_entry(self._sort_proj(t), t)
        else:
            self.append_with_ref(t, self.store.append(t))

    def append_with_ref(self, t, ref) -> None:
        if self.config.access == "UKI":
            self._append_entry(self._sort_proj(t), ref)
        else:
            self._append_entry(self._sort_proj(t) if self.store is None else None, ref)

    def _append_entry(self, sk, val) -> None:
        if sk is not None:
            self._tail_keys.append(sk)
        self._tail_vals.append(val)
        self._grow_to(len(self._vals) + len(self._tail_vals), exact=False)

    def finished_append(self) -> None:
        self._fold_tail(dedup=self.deferred)

    def _fold_tail(self, dedup: bool) -> None:
        if not self._tail_vals and not dedup:
            return
        if self.config.access == "UPI":
            self._vals.extend(self._tail_vals)
            self._tail_vals = []
            self._vals.sort(key=self._deref_key)
            if dedup:
                self._dedup_upi()
            return
        self._keys.extend(self._tail_keys)
        self._vals.extend(self._tail_vals)
        self._tail_keys = []
        self._tail_vals = []
        if self._keys:
            pairs = sorted(zip(self._keys, self._vals))
            if dedup:
                pairs = self._dedup_pairs(pairs)
            self._keys = [p[0] for p in pairs]
            self._vals = [p[1] for p in pairs]

    def _dedup_pairs(self, pairs):
        if self.store is None:
            # The sort key is the full permuted tuple; duplicates are
            # adjacent after the sort.
            out = []
            prev = object()
            for p in pairs:
                if p[1] != prev:
                    out.append(p)
                    prev = p[1]
            return out
        # Key-only ordering leaves identical tuples scattered inside an
        # equal-key run; dedup per run by the dereferenced tuple.
        get = self.store.get
        out = []
        run_key = object()
        run_seen: set = set()
        for p in pairs:
            if p[0] != run_key:
                run_key = p[0]
                run_seen = set()
            t = get(p[1])
            if t not in run_seen:
                run_seen.add(t)
                out.append(p)
        return out

    def _dedup_upi(self) -> None:
        get = self.store.get
        out = []
        prev = object()
        for ref in self._vals:
            t = get(ref)
            if t != prev:
                out.append(ref)
                prev = t
        self._vals = out

    def remove(self, t) -> bool:
        sk = self._sort_proj(t)
        lo, hi = self._range(sk)
        for i in range(lo, hi):
            if self._value_at(i) == t:
                if self._keys:
                    del self._keys[i]
                del self._vals[i]
                return True
        for i, val in enumerate(self._tail_vals):
            if (val if self.store is None else self.store.get(val)) == t:
                if self._tail_keys:
                    del self._tail_keys[i]
                del self._tail_vals[i]
                return True
        return False

    # -- lookup -------------------------------------------------------------
    def _range(self, lo_key, hi_key=None):
        """Index range of sorted entries with sort key in [lo_key, hi_key);
        hi_key None means the exclusive successor of lo_key."""
        if hi_key is None:
            hi_key = lo_key[:-1] + (lo_key[-1] + 1,)
        if self.config.access == "UPI":
            kf = self._deref_key
            return (
                bisect_left(self._vals, lo_key, key=kf),
                bisect_left(self._vals, hi_key, key=kf),
            )
        return bisect_left(self._keys, lo_key), bisect_left(self._keys, hi_key)

    def _value_at(self, i):
        v = self._vals[i]
        return v if self.store is None else self.store.get(v)

    def contains(self, t) -> bool:
        sk = self._sort_proj(t)
        lo, hi = self._range(sk)
        for i in range(lo, hi):
            if self._value_at(i) == t:
                return True
        if self.deferred:
            return False
        get = self.store.get if self.store is not None else None
        for val in self._tail_vals:
            if (val if get is None else get(val)) == t:
                return True
        return False

    def probe(self, values: tuple, prefix_len: int) -> list:
        """All tuples whose key prefix equals values, in key order."""
        lo_key = tuple(values)
        hi_key = lo_key[:-1] + (lo_key[-1] + 1,)
        lo, hi = self._range(lo_key, hi_key)
        if self.store is None:
            out = self._vals[lo:hi]
        else:
            get = self.store.get
            out = [get(r) for r in self._vals[lo:hi]]
        if self._tail_vals and not self.deferred:
            kp = self.key[:prefix_len]
            get = self.store.get if self.store is not None else None
            for val in self._tail_vals:
                t = val if get is None else get(val)
                if all(t[a] == v for a, v in zip(kp, values)):
                    out.append(t)
        return out

    def iterate(self):
        if self.store is None:
            if not self._tail_vals:
                return self._vals
            return self._vals + self._tail_vals
        get = self.store.get
        return [get(r) for r in self._vals] + [get(r) for r in self._tail_vals]

    def size(self) -> int:
        return len(self._vals) + len(self._tail_vals)

    def memory_footprint(self) -> int:
        """Capacity bytes of the backing array: entries * (8 B per attribute
        for CI, key bytes + one ref for UKI, one ref for UPI), grown in
        2 MiB steps (exact on bulk_load, one chunk at a time on append)."""
        self._grow_to(self.size(), exact=False)
        return self._capacity_bytes
