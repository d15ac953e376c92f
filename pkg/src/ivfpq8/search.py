"""IVFPQ search: cluster selection, lookup tables, scan, top-k, recall.

Per query and per probed cluster, the residual between query and
centroid is turned into an s x 2^p table of squared sub-distances,
stored in a selectable precision (f32, f16, e5m3, e4m4).  Candidate
distances are then pure table lookups accumulated in float32: the
reduced-precision formats are storage-only, never arithmetic types.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import minifloat
from .datasets import NeighborLists, squared_l2_to_all
from .index import IvfPqIndex
from .pq import PQCodebook
from .validation import check_matrix, check_vector

__all__ = [
    "LUT_PRECISIONS",
    "Lut",
    "SearchParams",
    "TopKResult",
    "select_clusters",
    "build_lut",
    "scan_list",
    "top_k",
    "search",
    "search_batch",
    "recall",
]

# precision name -> stored bytes per table entry
LUT_PRECISIONS = {"f32": 4, "f16": 2, "e5m3": 1, "e4m4": 1}

_MINIFLOAT_SPECS = {"e5m3": minifloat.E5M3, "e4m4": minifloat.E4M4}


def _check_precision(precision: str) -> str:
    if precision not in LUT_PRECISIONS:
        raise ValueError(
            f"unknown LUT precision {precision!r}; expected one of {sorted(LUT_PRECISIONS)}"
        )
    return precision


@dataclass(frozen=True)
class SearchParams:
    k: int = 10
    nprobe: int = 1
    precision: str = "f32"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.nprobe < 1:
            raise ValueError("nprobe must be at least 1")
        _check_precision(self.precision)


@dataclass
class Lut:
    """Squared sub-distance table in storage precision.

    entries is (s, 2^p): float32 for f32, uint16 binary16 bit patterns
    for f16, uint8 minifloat codes for e5m3/e4m4.
    """

    entries: np.ndarray
    precision: str

    def decoded(self) -> np.ndarray:
        """Stored values widened to float32; exact for every precision."""
        if self.precision == "f32":
            return self.entries
        if self.precision == "f16":
            return minifloat.decode_f16_array(self.entries)
        return minifloat.decode_array(self.entries, _MINIFLOAT_SPECS[self.precision])


class TopKResult(NamedTuple):
    ids: np.ndarray
    distances: np.ndarray
    short: bool  # fewer candidates than requested


def select_clusters(idx: IvfPqIndex, q: np.ndarray, nprobe: int) -> np.ndarray:
    """The nprobe centroids nearest to q, ascending distance, ties by id."""
    if not 1 <= nprobe <= idx.nlist:
        raise ValueError(f"nprobe={nprobe} out of range 1..{idx.nlist}")
    q = check_vector(q, idx.d)
    d2 = squared_l2_to_all(idx.coarse, q)
    return np.argsort(d2, kind="stable")[:nprobe]


def _raw_table(cb: PQCodebook, residual_query: np.ndarray) -> np.ndarray:
    """Squared distances between query sub-vectors and every sub-centroid.

    float32 arithmetic, accumulated sequentially over the sub-dimensions;
    entry [j, c] = ||sub_j(rq) - centers[j][c]||^2.
    """
    rq = residual_query.reshape(cb.s, 1, cb.sub_d)
    diff = cb.centers - rq
    acc = np.zeros((cb.s, cb.n_codes), dtype=np.float32)
    for t in range(cb.sub_d):
        acc += diff[:, :, t] * diff[:, :, t]
    return acc


def build_lut(cb: PQCodebook, residual_query: np.ndarray, precision: str = "f32") -> Lut:
    """Compute the table in float32, then store it in the chosen precision.

    f32 keeps exact values, f16 rounds to nearest even, e5m3/e4m4
    truncate toward zero.
    """
    _check_precision(precision)
    rq = check_vector(residual_query, cb.d, "residual_query")
    raw = _raw_table(cb, rq)
    if precision == "f32":
        return Lut(entries=raw, precision=precision)
    if precision == "f16":
        return Lut(entries=minifloat.encode_f16_array(raw), precision=precision)
    return Lut(entries=minifloat.encode_array(raw, _MINIFLOAT_SPECS[precision]), precision=precision)


def scan_list(ids: np.ndarray, codes: np.ndarray, lut: Lut) -> tuple[np.ndarray, np.ndarray]:
    """Accumulate R = sum_j table[j][code_j] per candidate, float32,
    sequentially over subspaces; distances are never recomputed here."""
    table = lut.decoded()
    s = table.shape[0]
    if codes.shape != (ids.shape[0], s):
        raise ValueError("codes shape must be (len(ids), s)")
    if codes.size and codes.max() >= table.shape[1]:
        raise ValueError("code byte out of range for the table")
    acc = np.zeros(ids.shape[0], dtype=np.float32)
    for j in range(s):
        acc += table[j, codes[:, j]]
    return ids, acc


def top_k(ids: np.ndarray, distances: np.ndarray, k: int) -> TopKResult:
    """k smallest by distance, ascending, ties by lower id; short sets
    are returned whole and flagged rather than rejected."""
    if ids.shape[0] == 0:
        raise ValueError("top_k requires at least one candidate")
    order = np.lexsort((ids, distances))[:k]
    return TopKResult(
        ids=np.asarray(ids)[order],
        distances=np.asarray(distances)[order],
        short=ids.shape[0] < k,
    )


def search(idx: IvfPqIndex, q: np.ndarray, params: SearchParams) -> TopKResult:
    """Full search for one query.

    Selects nprobe clusters, then per cluster computes the query
    residual against that centroid, builds a fresh LUT (residuals are
    centroid-relative, so tables cannot be shared across clusters),
    scans the inverted list, and merges all candidates through top_k.
    """
    q = check_vector(q, idx.d)
    clusters = select_clusters(idx, q, params.nprobe)
    id_parts, dist_parts = [], []
    for c in clusters:
        ids = idx.list_ids[c]
        if ids.shape[0] == 0:
            continue
        rq = q - idx.coarse[c]
        lut = build_lut(idx.cb, rq, params.precision)
        _, r = scan_list(ids, idx.list_codes[c], lut)
        id_parts.append(ids)
        dist_parts.append(r)
    if not id_parts:
        return TopKResult(
            ids=np.empty(0, dtype=np.int64),
            distances=np.empty(0, dtype=np.float32),
            short=True,
        )
    return top_k(np.concatenate(id_parts), np.concatenate(dist_parts), params.k)


def search_batch(idx: IvfPqIndex, queries, params: SearchParams) -> tuple[NeighborLists, int]:
    """Search every query row; short rows are padded with id -1 and
    +inf distance.  Returns the lists and how many rows came up short."""
    queries = check_matrix(queries, "queries")
    if queries.shape[1] != idx.d:
        raise ValueError(f"queries have d={queries.shape[1]}, index has d={idx.d}")
    nq = queries.shape[0]
    ids = np.full((nq, params.k), -1, dtype=np.int64)
    dists = np.full((nq, params.k), np.inf, dtype=np.float32)
    n_short = 0
    for i in range(nq):
        row = search(idx, queries[i], params)
        m = row.ids.shape[0]
        ids[i, :m] = row.ids
        dists[i, :m] = row.distances
        n_short += int(row.short)
    return NeighborLists(ids=ids, distances=dists), n_short


def recall(results: NeighborLists, gt: NeighborLists) -> tuple[np.ndarray, float]:
    """Per-query |ids(results) ∩ ids(gt)| / |ids(gt)| and the mean.

    Padding ids (-1) never match, so short rows count their missing
    slots as misses.
    """
    if results.n_queries != gt.n_queries:
        raise ValueError(
            f"result rows ({results.n_queries}) != ground-truth rows ({gt.n_queries})"
        )
    if gt.k == 0:
        raise ValueError("ground truth has no neighbors per query")
    res = results.ids
    hits = (res[:, :, None] == gt.ids[:, None, :]) & (res[:, :, None] >= 0)
    per_query = hits.any(axis=2).sum(axis=1) / gt.k
    return per_query, float(per_query.mean())
