"""Vector dataset IO, synthetic data, and the exact k-NN oracle.

File containers follow the texmex corpus conventions, little-endian:
fvecs records are (int32 d, d float32), bvecs (int32 d, d uint8),
ivecs (int32 k, k int32).  Vectors are plain float32 row-major arrays;
neighbor lists pair an id matrix with optional squared distances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .validation import check_matrix

__all__ = [
    "NeighborLists",
    "read_fvecs",
    "read_bvecs",
    "read_ivecs",
    "write_ivecs",
    "write_fvecs",
    "read_vectors",
    "synth_gaussian_mixture",
    "squared_l2_to_all",
    "brute_force_knn",
]


@dataclass
class NeighborLists:
    """Per-query neighbor ids (q x k) with optional squared L2 distances.

    Rows are sorted by distance with ties broken by smaller id; short
    rows (fewer reachable candidates than k) are padded with id -1.
    """

    ids: np.ndarray
    distances: np.ndarray | None = None

    def __post_init__(self):
        self.ids = np.ascontiguousarray(self.ids, dtype=np.int64)
        if self.ids.ndim != 2:
            raise ValueError(f"ids must be 2-dimensional, got {self.ids.shape}")
        if self.distances is not None:
            self.distances = np.ascontiguousarray(self.distances, dtype=np.float32)
            if self.distances.shape != self.ids.shape:
                raise ValueError("distances shape must match ids shape")

    @property
    def n_queries(self) -> int:
        return self.ids.shape[0]

    @property
    def k(self) -> int:
        return self.ids.shape[1]


def _read_records(path, elem_dtype, widen_to=None) -> np.ndarray:
    """Parse a (int32 dim, dim * elem) record stream into a 2-D array."""
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size == 0:
        warnings.warn(f"{path}: empty file, returning a 0x0 array")
        out_dtype = widen_to or elem_dtype
        return np.empty((0, 0), dtype=out_dtype)
    if raw.size < 4:
        raise ValueError(f"{path}: truncated file (no leading dimension)")
    d = int(raw[:4].view("<i4")[0])
    if d <= 0:
        raise ValueError(f"{path}: invalid leading dimension {d}")
    itemsize = np.dtype(elem_dtype).itemsize
    rec_bytes = 4 + d * itemsize
    if raw.size % rec_bytes != 0:
        raise ValueError(f"{path}: truncated file (not a multiple of record size)")
    n = raw.size // rec_bytes
    records = raw.reshape(n, rec_bytes)
    dims = records[:, :4].copy().view("<i4").ravel()
    if not np.all(dims == d):
        bad = int(np.argmax(dims != d))
        raise ValueError(
            f"{path}: record {bad} has dimension {int(dims[bad])}, expected {d}"
        )
    body = records[:, 4:].copy().view(elem_dtype)
    if widen_to is not None:
        body = body.astype(widen_to)
    return np.ascontiguousarray(body)


def read_fvecs(path) -> np.ndarray:
    """Read an fvecs file into an (n, d) float32 array."""
    return _read_records(path, "<f4")


def read_bvecs(path) -> np.ndarray:
    """Read a bvecs file, widening uint8 payloads to float32 (exact)."""
    return _read_records(path, np.uint8, widen_to=np.float32)


def read_ivecs(path) -> NeighborLists:
    """Read an ivecs file of neighbor ids."""
    ids = _read_records(path, "<i4")
    return NeighborLists(ids=ids.astype(np.int64))


def write_ivecs(path, lists: NeighborLists) -> None:
    """Write neighbor ids as ivecs; inverse of read_ivecs on the ids."""
    ids = lists.ids
    if ids.size and (ids.max() > np.iinfo(np.int32).max or ids.min() < np.iinfo(np.int32).min):
        raise ValueError("ids exceed the int32 range of the ivecs container")
    q, k = ids.shape
    rec = np.empty((q, k + 1), dtype="<i4")
    rec[:, 0] = k
    rec[:, 1:] = ids
    rec.tofile(path)


def write_fvecs(path, X) -> None:
    """Write an (n, d) float32 array as fvecs."""
    X = np.ascontiguousarray(X, dtype=np.float32)
    n, d = X.shape
    rec = np.empty((n, 1 + d), dtype="<f4")
    rec[:, 1:] = X
    rec.view("<i4")[:, 0] = d
    rec.tofile(path)


def read_vectors(path) -> np.ndarray:
    """Read fvecs or bvecs, dispatching on the file extension."""
    name = str(path).lower()
    if name.endswith(".fvecs"):
        return read_fvecs(path)
    if name.endswith(".bvecs"):
        return read_bvecs(path)
    raise ValueError(f"{path}: unknown vector container (expected .fvecs or .bvecs)")


def synth_gaussian_mixture(
    n: int,
    d: int,
    n_components: int,
    spread: float,
    seed: int,
    return_components: bool = False,
):
    """Sample an isotropic Gaussian mixture, deterministic under seed.

    Component means are uniform in the unit hypercube; each point picks
    a component uniformly and adds N(0, spread^2) noise per coordinate.
    With return_components, also returns (means, labels) so tests can
    compare recovered centroids against the generator.
    """
    if n <= 0 or d <= 0 or n_components <= 0:
        raise ValueError("n, d, and n_components must be positive")
    rng = np.random.default_rng(seed)
    means = rng.random((n_components, d))
    labels = rng.integers(0, n_components, size=n)
    noise = rng.standard_normal((n, d))
    data = (means[labels] + spread * noise).astype(np.float32)
    if return_components:
        return data, means.astype(np.float32), labels
    return data


def squared_l2_to_all(base: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Squared L2 distance from q to every row of base.

    Accumulated in float32, sequentially over dimensions, so the oracle's
    exact summation order is fixed and reproducible.
    """
    diff = base - q
    acc = np.zeros(base.shape[0], dtype=np.float32)
    for j in range(base.shape[1]):
        acc += diff[:, j] * diff[:, j]
    return acc


def brute_force_knn(base, queries, k: int) -> NeighborLists:
    """Exact top-k by squared L2, ties broken by smaller vector id."""
    base = check_matrix(base, "base")
    queries = check_matrix(queries, "queries")
    if base.shape[1] != queries.shape[1]:
        raise ValueError(
            f"dimension mismatch: base d={base.shape[1]}, queries d={queries.shape[1]}"
        )
    if k > base.shape[0]:
        raise ValueError(f"k={k} exceeds base size {base.shape[0]}")
    if k < 1:
        raise ValueError("k must be at least 1")

    nq = queries.shape[0]
    ids = np.empty((nq, k), dtype=np.int64)
    dists = np.empty((nq, k), dtype=np.float32)
    for i in range(nq):
        d2 = squared_l2_to_all(base, queries[i])
        # stable sort on distance keeps ascending id order within ties
        order = np.argsort(d2, kind="stable")[:k]
        ids[i] = order
        dists[i] = d2[order]
    return NeighborLists(ids=ids, distances=dists)
