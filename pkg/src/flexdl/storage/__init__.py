"""Physical representations: four access types over five index structures
plus the raw row store, combined per the supported-combination table."""

from __future__ import annotations

from ..errors import InvalidCombinationError
from .btree import BTreeRep, DEFAULT_NODE_CAPACITY
from .core import (
    CHUNK_BYTES,
    IndexKey,
    RepConfig,
    RowStore,
    TupleRef,
    check_key,
    encode_key,
    full_order,
    parse_key,
    render_key,
    table_combinations,
    valid_combination,
)
from .fullscan import FullScanRep
from .hashtable import HashTableRep
from .radix import RadixTreeRep
from .sorted_array import SortedArrayRep

Representation = SortedArrayRep | BTreeRep | HashTableRep | RadixTreeRep | FullScanRep


def create(
    config: RepConfig,
    arity: int,
    store: RowStore | None = None,
    node_capacity: int = DEFAULT_NODE_CAPACITY,
) -> Representation:
    """Instantiate a representation; a store is supplied exactly when the
    access type is unclustered (UKI/UPI) or a full scan (FS)."""
    needs_store = config.access in ("UKI", "UPI", "FS")
    if needs_store and store is None:
        raise InvalidCombinationError(
            f"{config.access}-{config.ds} requires a row store"
        )
    if not needs_store and store is not None:
        raise InvalidCombinationError(
            f"{config.access}-{config.ds} owns its tuples; no store applies"
        )
    if config.access == "FS":
        return FullScanRep(config, arity, store)
    check_key(config.key, arity)
    if config.ds in ("SA", "SAPP"):
        return SortedArrayRep(config, arity, store)
    if config.ds == "BP":
        return BTreeRep(config, arity, store, node_capacity)
    if config.ds == "HT":
        return HashTableRep(config, arity, store)
    if config.ds == "RX":
        return RadixTreeRep(config, arity, store)
    raise InvalidCombinationError(f"unhandled structure {config.ds}")


__all__ = [
    "CHUNK_BYTES",
    "DEFAULT_NODE_CAPACITY",
    "BTreeRep",
    "FullScanRep",
    "HashTableRep",
    "IndexKey",
    "RadixTreeRep",
    "RepConfig",
    "Representation",
    "RowStore",
    "SortedArrayRep",
    "TupleRef",
    "check_key",
    "create",
    "encode_key",
    "full_order",
    "parse_key",
    "render_key",
    "table_combinations",
    "valid_combination",
]
