"""Core storage types: index keys, key encoding, tuple refs, the row store.

Tuples are Python tuples of unsigned 64-bit ints. Memory footprints are a
byte model of a packed 64-bit layout (8 bytes per attribute, 8 per
reference), not Python object sizes; every representation documents its
model next to memory_footprint.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from ..errors import InvalidCombinationError

CHUNK_BYTES = 2 * 1024 * 1024

ACCESS_TYPES = ("CI", "UKI", "UPI", "FS")
DATA_STRUCTURES = ("SA", "SAPP", "BP", "HT", "RX", "RS")

# Unclustered and covered indexes pair with the four index structures;
# the row store is reachable only through full scans.
_VALID = {
    ("CI", "SA"), ("CI", "SAPP"), ("CI", "BP"), ("CI", "HT"), ("CI", "RX"),
    ("UKI", "SA"), ("UKI", "SAPP"), ("UKI", "BP"), ("UKI", "HT"), ("UKI", "RX"),
    ("UPI", "SA"), ("UPI", "SAPP"), ("UPI", "BP"), ("UPI", "HT"), ("UPI", "RX"),
    ("FS", "RS"),
}


def valid_combination(access: str, ds: str) -> bool:
    return (access, ds) in _VALID


def table_combinations() -> list[tuple[str, str]]:
    """The 13 meaningful (access, structure) cells; SA covers its deferred-
    dedup variant SAPP, which shares the cell."""
    out = []
    for ds in ("SA", "BP", "HT", "RX"):
        for access in ("CI", "UKI", "UPI"):
            out.append((access, ds))
    out.append(("FS", "RS"))
    return out


IndexKey = tuple[int, ...]


def render_key(key: IndexKey | None) -> str:
    if key is None:
        return "-"
    return "_".join(str(a) for a in key)


def parse_key(text: str) -> IndexKey | None:
    if text == "-":
        return None
    return tuple(int(p) for p in text.split("_"))


def check_key(key: IndexKey, arity: int) -> None:
    if len(set(key)) != len(key):
        raise InvalidCombinationError(f"index key {render_key(key)} repeats attributes")
    if not key or any(a < 0 or a >= arity for a in key):
        raise InvalidCombinationError(
            f"index key {render_key(key)} out of range for arity {arity}"
        )


def encode_key(t: tuple[int, ...], key: IndexKey) -> bytes:
    """Concatenated big-endian 8-byte attribute values: byte order equals
    value order, so encodings compare like the projected tuples."""
    packer = struct.Struct(f">{len(key)}Q")
    return packer.pack(*(t[a] for a in key))


def make_projector(attrs: IndexKey):
    """Tuple-valued projection onto attrs (always returns a tuple)."""
    if len(attrs) == 1:
        a = attrs[0]
        return lambda t: (t[a],)
    import operator

    return operator.itemgetter(*attrs)


def full_order(key: IndexKey, arity: int) -> IndexKey:
    """The index key extended by the remaining attributes in position order;
    a bijective permutation used as the physical sort order."""
    rest = tuple(a for a in range(arity) if a not in key)
    return key + rest


def probe_order(config, arity: int) -> IndexKey:
    """Attribute order a probe prefix addresses on this representation.

    Clustered and positionally unclustered sorted arrays and trees sort by
    the full permutation, so probes may run past the declared key. Key
    indexes (UKI) materialize only the key attributes, and the radix tree
    encodes only them, so neither can be probed further.
    """
    if config.ds == "RX" or config.access == "UKI":
        return config.key
    return full_order(config.key, arity)


class TupleRef(NamedTuple):
    """Stable address of a tuple in a row store chunk; valid forever."""

    chunk: int
    offset: int


class RowStore:
    """Insertion-ordered tuple store in fixed 2 MiB chunks.

    Chunks are never moved or resized, so TupleRefs stay valid across any
    number of appends. Removal (used only by full-scan representations)
    tombstones the cell and keeps the ref dereferenceable to None.
    """

    def __init__(self, arity: int):
        self.arity = arity
        self.tuples_per_chunk = max(1, CHUNK_BYTES // (8 * arity))
        self._chunks: list[list] = []
        self._live = 0

    def append(self, t: tuple[int, ...]) -> TupleRef:
        chunks = self._chunks
        if not chunks or len(chunks[-1]) >= self.tuples_per_chunk:
            chunks.append([])
        chunk = chunks[-1]
        ref = TupleRef(len(chunks) - 1, len(chunk))
        chunk.append(t)
        self._live += 1
        return ref

    def extend(self, tuples: Iterable[tuple[int, ...]]) -> list[TupleRef]:
        return [self.append(t) for t in tuples]

    def get(self, ref: TupleRef):
        return self._chunks[ref.chunk][ref.offset]

    def remove(self, ref: TupleRef) -> None:
        if self._chunks[ref.chunk][ref.offset] is not None:
            self._chunks[ref.chunk][ref.offset] = None
            self._live -= 1

    def iterate(self):
        for chunk in self._chunks:
            for t in chunk:
                if t is not None:
                    yield t

    def refs(self):
        for ci, chunk in enumerate(self._chunks):
            for oi, t in enumerate(chunk):
                if t is not None:
                    yield TupleRef(ci, oi)

    def size(self) -> int:
        return self._live

    def memory_footprint(self) -> int:
        return len(self._chunks) * CHUNK_BYTES


@dataclass(frozen=True)
class RepConfig:
    """Physical representation choice for one relation role."""

    access: str
    ds: str
    key: IndexKey | None

    def __post_init__(self):
        if self.access not in ACCESS_TYPES:
            raise InvalidCombinationError(f"unknown access type {self.access!r}")
        if self.ds not in DATA_STRUCTURES:
            raise InvalidCombinationError(f"unknown data structure {self.ds!r}")
        if not valid_combination(self.access, self.ds):
            raise InvalidCombinationError(
                f"{self.access} cannot be combined with {self.ds}"
            )
        if self.access == "FS":
            if self.key is not None:
                raise InvalidCombinationError("full scans take no index key")
        elif self.key is None:
            raise InvalidCombinationError(f"{self.access}-{self.ds} requires an index key")

    def label(self) -> str:
        return f"{render_key(self.key)}:{self.access}-{self.ds}"
