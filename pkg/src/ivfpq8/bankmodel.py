"""Analytical shared-memory bank-conflict model for lookup tables.

Predicts, never measures: a warp of 32 threads reads one table entry
each, the table is spread over 32 banks of 4-byte rows, and accesses
to distinct rows of the same bank serialize.  Same-row accesses within
a bank broadcast and are conflict-free, so four consecutive 1-byte
entries (one row) cost nothing extra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BankGeometry",
    "DEFAULT_GEOMETRY",
    "lanes_per_bank",
    "worst_case_conflicts",
    "simulate_warp_access",
    "simulate_warp_access_batch",
    "adversarial_pattern",
]

WARP_SIZE = 32


@dataclass(frozen=True)
class BankGeometry:
    banks: int = 32
    bank_width_bytes: int = 4

    def __post_init__(self):
        if self.banks <= 0 or self.bank_width_bytes <= 0:
            raise ValueError("bank count and width must be positive")


DEFAULT_GEOMETRY = BankGeometry()


def _check_layout(entries: int, elem_bytes: int, geom: BankGeometry) -> None:
    if entries <= 0 or elem_bytes <= 0:
        raise ValueError("entries and elem_bytes must be positive")
    w = geom.bank_width_bytes
    if w % elem_bytes != 0 and elem_bytes % w != 0:
        raise ValueError(
            f"element size {elem_bytes} does not tile {w}-byte bank rows"
        )


def lanes_per_bank(
    entries: int, elem_bytes: int, geom: BankGeometry = DEFAULT_GEOMETRY
) -> int:
    """Distinct rows each bank contributes to a table of ``entries`` elements.

    ceil(entries * elem_bytes / (banks * bank_width_bytes)); a 256-entry
    table of 4-byte elements occupies 8 rows per bank, 2-byte elements 4,
    1-byte elements 2.
    """
    _check_layout(entries, elem_bytes, geom)
    total_bytes = entries * elem_bytes
    row_bytes = geom.banks * geom.bank_width_bytes
    return -(-total_bytes // row_bytes)


def worst_case_conflicts(
    entries: int, elem_bytes: int, geom: BankGeometry = DEFAULT_GEOMETRY
) -> int:
    """Worst-case serialized replays: rows per bank minus one."""
    return lanes_per_bank(entries, elem_bytes, geom) - 1


def simulate_warp_access(
    addresses, elem_bytes: int, geom: BankGeometry = DEFAULT_GEOMETRY
) -> int:
    """Conflict count for one warp's 32 table-index accesses.

    Each index maps to a 4-byte row (index * elem_bytes // bank_width)
    and a bank (row mod banks).  The count is the largest number of
    distinct rows requested in any single bank, minus one; repeated
    rows in a bank broadcast.
    """
    if elem_bytes <= 0:
        raise ValueError("elem_bytes must be positive")
    idx = np.asarray(addresses, dtype=np.int64)
    if idx.shape != (WARP_SIZE,):
        raise ValueError(f"expected {WARP_SIZE} addresses, got shape {idx.shape}")
    rows = (idx * elem_bytes) // geom.bank_width_bytes
    banks = rows % geom.banks
    pairs = np.unique(banks * (rows.max() + 1) + rows)
    counts = np.bincount((pairs // (rows.max() + 1)).astype(np.int64))
    return int(counts.max()) - 1


def simulate_warp_access_batch(
    patterns, elem_bytes: int, geom: BankGeometry = DEFAULT_GEOMETRY
) -> np.ndarray:
    """simulate_warp_access over many patterns at once; shape (n, 32) in,
    (n,) conflict counts out."""
    if elem_bytes <= 0:
        raise ValueError("elem_bytes must be positive")
    idx = np.asarray(patterns, dtype=np.int64)
    if idx.ndim != 2 or idx.shape[1] != WARP_SIZE:
        raise ValueError(f"expected (n, {WARP_SIZE}) addresses, got shape {idx.shape}")
    n = idx.shape[0]
    rows = (idx * elem_bytes) // geom.bank_width_bytes
    banks = rows % geom.banks
    span = int(rows.max()) + 1
    keys = np.sort(banks * span + rows, axis=1)
    first = np.ones_like(keys, dtype=bool)
    first[:, 1:] = keys[:, 1:] != keys[:, :-1]
    pattern_idx, _ = np.nonzero(first)
    bank_of_key = (keys[first] // span).astype(np.int64)
    counts = np.bincount(
        pattern_idx * geom.banks + bank_of_key, minlength=n * geom.banks
    ).reshape(n, geom.banks)
    return counts.max(axis=1) - 1


def adversarial_pattern(
    entries: int, elem_bytes: int, geom: BankGeometry = DEFAULT_GEOMETRY
) -> np.ndarray:
    """A warp access pattern achieving the analytical worst case.

    All 32 threads target bank 0, cycling through each of its rows:
    consecutive rows of one bank are ``banks * elements_per_row``
    indices apart.
    """
    _check_layout(entries, elem_bytes, geom)
    lanes = lanes_per_bank(entries, elem_bytes, geom)
    elems_per_row = max(1, geom.bank_width_bytes // elem_bytes)
    stride = geom.banks * elems_per_row
    base = np.array([(r * stride) % entries for r in range(lanes)], dtype=np.int64)
    return base[np.arange(WARP_SIZE) % lanes]
