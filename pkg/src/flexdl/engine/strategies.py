"""Duplicate-elimination build-up strategies.

Every pass of recursive evaluation collects candidate head facts and must
decide which are genuinely new. The four strategies order the contains /
append / remove operations differently but end each pass with identical base
and delta contents; only the operation counts differ:

S1  check the accumulated relation first, then the fresh one, append to the
    fresh one; merge the fresh relation into the accumulated one afterwards.
S2  like S1 with the two containment checks swapped.
S3  check the accumulated relation only and append to both eagerly; no merge
    pass is needed.
S4  check only the fresh relation while deriving, then subtract the
    accumulated relation from it before merging.
"""

from __future__ import annotations

STRATEGY_NAMES = ("S1", "S2", "S3", "S4")


class _StrategyBase:
    """Per-relation, per-pass state. offer() is the sink fed by rule
    execution; finish() runs the end-of-pass epilogue and flushes operation
    counts to the representation buckets. Offer-side counts stay readable as
    plain attributes so the driver can attribute them to individual rules."""

    __slots__ = ("rt", "cb", "cn", "an", "ab", "_base_contains",
                 "_new_contains")

    def __init__(self, rt):
        self.rt = rt
        self.cb = 0  # contains on the accumulated (base) relation
        self.cn = 0  # contains on the fresh (new) relation
        self.an = 0  # appends to new
        self.ab = 0  # appends to base during offers (S3 only)
        self._base_contains = rt.base_handles[0].rep.contains
        self._new_contains = rt.new_handles[0].rep.contains

    def _flush_offers(self) -> None:
        rt = self.rt
        rt.base_handles[0].counts.contains_calls += self.cb
        rt.new_handles[0].counts.contains_calls += self.cn
        if self.an:
            for h in rt.new_handles:
                h.counts.append_calls += self.an
        if self.ab:
            for h in rt.base_handles:
                h.counts.append_calls += self.ab

    def _merge_new_into_base(self) -> int:
        """Shared S1/S2/S4 tail: fold the finished new relation into base."""
        rt = self.rt
        merged = list(rt.new_handles[0].rep.iterate())
        h0 = rt.new_handles[0]
        h0.counts.iterate_calls += 1
        h0.counts.iterate_returned += len(merged)
        for t in merged:
            rt.append_base(t)
        if merged:
            for h in rt.base_handles:
                h.counts.append_calls += len(merged)
        rt.finished_append_base()
        return len(merged)


class S1(_StrategyBase):
    __slots__ = ()

    def offer(self, t) -> None:
        self.cb += 1
        if self._base_contains(t):
            return
        self.cn += 1
        if self._new_contains(t):
            return
        self.an += 1
        self.rt.append_new(t)

    def finish(self) -> int:
        self.rt.finished_append_new()
        n = self._merge_new_into_base()
        self._flush_offers()
        return n


class S2(_StrategyBase):
    __slots__ = ()

    def offer(self, t) -> None:
        self.cn += 1
        if self._new_contains(t):
            return
        self.cb += 1
        if self._base_contains(t):
            return
        self.an += 1
        self.rt.append_new(t)

    def finish(self) -> int:
        self.rt.finished_append_new()
        n = self._merge_new_into_base()
        self._flush_offers()
        return n


class S3(_StrategyBase):
    __slots__ = ()

    def offer(self, t) -> None:
        self.cb += 1
        if self._base_contains(t):
            return
        self.ab += 1
        self.rt.append_base(t)
        self.an += 1
        self.rt.append_new(t)

    def finish(self) -> int:
        rt = self.rt
        rt.finished_append_base()
        rt.finished_append_new()
        self._flush_offers()
        return rt.new_handles[0].rep.size()


class S4(_StrategyBase):
    __slots__ = ()

    def offer(self, t) -> None:
        self.cn += 1
        if self._new_contains(t):
            return
        self.an += 1
        self.rt.append_new(t)

    def finish(self) -> int:
        rt = self.rt
        rt.finished_append_new()
        base_list = list(rt.base_handles[0].rep.iterate())
        h_base = rt.base_handles[0]
        h_base.counts.iterate_calls += 1
        h_base.counts.iterate_returned += len(base_list)
        h_new = rt.new_handles[0]
        contains_new = h_new.rep.contains
        removed = 0
        for t in base_list:
            h_new.counts.contains_calls += 1
            if contains_new(t):
                removed += 1
                for h in rt.new_handles:
                    h.rep.remove(t)
                    h.counts.remove_calls += 1
        n = self._merge_new_into_base()
        self._flush_offers()
        return n


_CLASSES = {"S1": S1, "S2": S2, "S3": S3, "S4": S4}


def make_strategy(name: str, rt):
    return _CLASSES[name](rt)


class SeedSink:
    """Sink for non-recursive rules: append to base unless already present."""

    __slots__ = ("rt", "cb", "ab", "_contains")

    def __init__(self, rt):
        self.rt = rt
        self.cb = 0
        self.ab = 0
        self._contains = rt.base_handles[0].rep.contains

    def offer(self, t) -> None:
        self.cb += 1
        if self._contains(t):
            return
        self.ab += 1
        self.rt.append_base(t)

    def finish(self) -> None:
        rt = self.rt
        rt.finished_append_base()
        rt.base_handles[0].counts.contains_calls += self.cb
        if self.ab:
            for h in rt.base_handles:
                h.counts.append_calls += self.ab


class _SoloRT:
    """Adapter exposing two standalone representations through the runtime
    surface the strategies expect. Lets a strategy run outside the engine,
    e.g. over a recorded stream of found tuples."""

    def __init__(self, base_handle, new_handle):
        self.base_handles = [base_handle]
        self.new_handles = [new_handle]

    def append_base(self, t):
        self.base_handles[0].rep.append(t)

    def append_new(self, t):
        self.new_handles[0].rep.append(t)

    def finished_append_base(self):
        self.base_handles[0].rep.finished_append()

    def finished_append_new(self):
        self.new_handles[0].rep.finished_append()


def apply_strategy(name: str, found, base_handle, new_handle) -> int:
    """Feed `found` (an iterable of candidate tuples) through strategy `name`
    against a standalone base/new representation pair, run the epilogue, and
    return the number of tuples that ended up new. Operation counts accumulate
    on the handles."""
    strategy = _CLASSES[name](_SoloRT(base_handle, new_handle))
    for t in found:
        strategy.offer(t)
    return strategy.finish()
