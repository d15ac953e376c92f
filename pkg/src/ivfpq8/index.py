"""IVFPQ index: coarse centroids, PQ codebook, and inverted lists.

The on-disk format is flat and little-endian: magic "IVFPQ001",
u32 d/nlist/s/p/sub_d, u64 N, coarse centroids (f32), codebook (f32,
[subspace][code][dim]), then per list a u64 length, u64 ids, and raw
code bytes.  Serialization is canonical: equal indexes yield equal
bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .kmeans import assign_to_centroids, train_coarse
from .pq import PQCodebook, compute_residuals, pq_encode, train_pq
from .validation import check_matrix

__all__ = ["IvfPqIndex", "build_index", "save_index", "load_index"]

MAGIC = b"IVFPQ001"
_HEADER = struct.Struct("<8s5IQ")


@dataclass
class IvfPqIndex:
    """Immutable after build; lists partition the dataset ids.

    list_ids[c] holds ascending vector ids of cluster c; list_codes[c]
    the matching (len, s) uint8 PQ codes.
    """

    coarse: np.ndarray
    cb: PQCodebook
    list_ids: list[np.ndarray]
    list_codes: list[np.ndarray]

    @property
    def d(self) -> int:
        return self.coarse.shape[1]

    @property
    def nlist(self) -> int:
        return self.coarse.shape[0]

    @property
    def n_total(self) -> int:
        return sum(ids.shape[0] for ids in self.list_ids)

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        if self.cb.d != self.d:
            raise ValueError(f"codebook covers {self.cb.d} dims, index has {self.d}")
        if len(self.list_ids) != self.nlist or len(self.list_codes) != self.nlist:
            raise ValueError("one inverted list required per coarse centroid")
        seen = []
        for c, (ids, codes) in enumerate(zip(self.list_ids, self.list_codes)):
            if codes.shape != (ids.shape[0], self.cb.s):
                raise ValueError(f"list {c}: ids/codes shape mismatch")
            if ids.size and np.any(np.diff(ids) <= 0):
                raise ValueError(f"list {c}: ids not strictly ascending")
            if codes.size and codes.max() >= self.cb.n_codes:
                raise ValueError(f"list {c}: code byte out of range for p={self.cb.p}")
            seen.append(ids)
        all_ids = np.concatenate(seen) if seen else np.empty(0, dtype=np.int64)
        n = all_ids.size
        if n and not np.array_equal(np.sort(all_ids), np.arange(n)):
            raise ValueError("inverted lists do not partition ids 0..N-1")


def build_index(data, nlist: int, s: int, p: int, seed: int) -> IvfPqIndex:
    """Coarse k-means, residuals, one global PQ codebook, encode every row.

    Deterministic under seed; coarse and PQ training use seeds spawned
    from it.
    """
    X = check_matrix(data, "data")
    n, d = X.shape
    if n < max(nlist, 1 << p):
        raise ValueError(f"need at least max(nlist, 2^p) = {max(nlist, 1 << p)} rows, got {n}")
    if d % s != 0:
        raise ValueError(f"d={d} not divisible by s={s}")

    coarse_seed, pq_seed = np.random.SeedSequence(seed).generate_state(2)
    coarse = train_coarse(X, nlist, int(coarse_seed))
    assign, _ = assign_to_centroids(X, coarse)
    residuals = compute_residuals(X, coarse, assign)
    cb = train_pq(residuals, s, p, int(pq_seed))
    codes = pq_encode(residuals, cb)

    order = np.argsort(assign, kind="stable")  # ascending id within each cluster
    bounds = np.searchsorted(assign[order], np.arange(nlist + 1))
    list_ids = [order[bounds[c] : bounds[c + 1]].astype(np.int64) for c in range(nlist)]
    list_codes = [np.ascontiguousarray(codes[ids]) for ids in list_ids]
    return IvfPqIndex(coarse=coarse, cb=cb, list_ids=list_ids, list_codes=list_codes)


def save_index(idx: IvfPqIndex, path) -> None:
    with open(path, "wb") as f:
        f.write(
            _HEADER.pack(
                MAGIC, idx.d, idx.nlist, idx.cb.s, idx.cb.p, idx.cb.sub_d, idx.n_total
            )
        )
        f.write(np.ascontiguousarray(idx.coarse, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(idx.cb.centers, dtype="<f4").tobytes())
        for ids, codes in zip(idx.list_ids, idx.list_codes):
            f.write(struct.pack("<Q", ids.shape[0]))
            f.write(np.ascontiguousarray(ids, dtype="<u8").tobytes())
            f.write(np.ascontiguousarray(codes, dtype=np.uint8).tobytes())


def load_index(path) -> IvfPqIndex:
    """Read and validate an index file; rejects structural violations."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, d, nlist, s, p, sub_d, n_total = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not an index file (bad magic {magic!r})")
    if d <= 0 or nlist <= 0 or s <= 0 or sub_d <= 0 or not 1 <= p <= 8:
        raise ValueError(f"{path}: invalid header fields")
    if s * sub_d != d:
        raise ValueError(f"{path}: s*sub_d = {s * sub_d} does not match d = {d}")

    off = _HEADER.size
    n_codes = 1 << p

    def take(count, dtype):
        nonlocal off
        nbytes = count * np.dtype(dtype).itemsize
        if off + nbytes > len(blob):
            raise ValueError(f"{path}: truncated file")
        out = np.frombuffer(blob, dtype=dtype, count=count, offset=off)
        off += nbytes
        return out

    coarse = take(nlist * d, "<f4").reshape(nlist, d).copy()
    centers = take(s * n_codes * sub_d, "<f4").reshape(s, n_codes, sub_d).copy()

    list_ids, list_codes = [], []
    for _ in range(nlist):
        if off + 8 > len(blob):
            raise ValueError(f"{path}: truncated file")
        (length,) = struct.unpack_from("<Q", blob, off)
        off += 8
        ids = take(length, "<u8").astype(np.int64)
        codes = take(length * s, np.uint8).reshape(length, s).copy()
        list_ids.append(ids)
        list_codes.append(codes)
    if off != len(blob):
        raise ValueError(f"{path}: {len(blob) - off} trailing bytes")

    idx = IvfPqIndex(coarse=coarse, cb=PQCodebook(centers=centers, p=p), list_ids=list_ids, list_codes=list_codes)
    if idx.n_total != n_total:
        raise ValueError(f"{path}: header claims {n_total} vectors, lists hold {idx.n_total}")
    idx.validate()
    return idx
