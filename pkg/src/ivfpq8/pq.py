"""Product quantization: sub-codebook training and residual encoding.

A d-dimensional residual is split into s contiguous blocks of d/s
dimensions; each block is quantized independently against its own
2^p-entry codebook, giving an s-byte code per vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kmeans import KMeansParams, assign_to_centroids, kmeans
from .validation import check_matrix

__all__ = ["PQCodebook", "compute_residuals", "train_pq", "pq_encode", "reconstruct"]


@dataclass
class PQCodebook:
    """centers has shape (s, 2^p, sub_d); subspace j covers dimensions
    [j*sub_d, (j+1)*sub_d)."""

    centers: np.ndarray
    p: int

    def __post_init__(self):
        self.centers = np.ascontiguousarray(self.centers, dtype=np.float32)
        if self.centers.ndim != 3:
            raise ValueError("centers must have shape (s, n_codes, sub_d)")
        if self.centers.shape[1] != 1 << self.p:
            raise ValueError(
                f"expected {1 << self.p} codes per subspace, got {self.centers.shape[1]}"
            )

    @property
    def s(self) -> int:
        return self.centers.shape[0]

    @property
    def n_codes(self) -> int:
        return self.centers.shape[1]

    @property
    def sub_d(self) -> int:
        return self.centers.shape[2]

    @property
    def d(self) -> int:
        return self.s * self.sub_d


def compute_residuals(data, centroids, assignments) -> np.ndarray:
    """Row i minus its assigned centroid, exact float32 subtraction."""
    data = check_matrix(data, "data")
    centroids = check_matrix(centroids, "centroids")
    assignments = np.asarray(assignments, dtype=np.int64)
    if assignments.shape != (data.shape[0],):
        raise ValueError("assignments must have one entry per data row")
    if assignments.size and (assignments.min() < 0 or assignments.max() >= centroids.shape[0]):
        raise ValueError("assignment index out of range")
    return data - centroids[assignments]


def train_pq(residuals, s: int, p: int, seed: int) -> PQCodebook:
    """Independent k-means (k = 2^p) on each subspace's dimension slice.

    Subspace runs draw from seeds spawned deterministically off ``seed``,
    so each codebook depends only on its own slice of the data.
    """
    residuals = check_matrix(residuals, "residuals")
    n, d = residuals.shape
    if not 1 <= p <= 8:
        raise ValueError("p must be in 1..8 (one byte per sub-code)")
    if s < 1 or d % s != 0:
        raise ValueError(f"d={d} not divisible by s={s}")
    n_codes = 1 << p
    if n < n_codes:
        raise ValueError(f"need at least 2^p={n_codes} training rows, got {n}")

    sub_d = d // s
    sub_seeds = np.random.SeedSequence(seed).generate_state(s)
    centers = np.empty((s, n_codes, sub_d), dtype=np.float32)
    for j in range(s):
        block = residuals[:, j * sub_d : (j + 1) * sub_d]
        params = KMeansParams(k=n_codes, seed=int(sub_seeds[j]))
        centers[j] = kmeans(block, params).centroids
    return PQCodebook(centers=centers, p=p)


def pq_encode(residuals, cb: PQCodebook) -> np.ndarray:
    """Nearest sub-centroid per subspace, ties to the lower code.

    Accepts one residual (d,) or a batch (n, d); returns uint8 codes of
    shape (s,) or (n, s).
    """
    arr = np.ascontiguousarray(residuals, dtype=np.float32)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != cb.d:
        raise ValueError(f"residuals must have {cb.d} dimensions")

    codes = np.empty((arr.shape[0], cb.s), dtype=np.uint8)
    for j in range(cb.s):
        block = arr[:, j * cb.sub_d : (j + 1) * cb.sub_d]
        assign, _ = assign_to_centroids(block, cb.centers[j])
        codes[:, j] = assign
    return codes[0] if single else codes


def reconstruct(codes, cb: PQCodebook) -> np.ndarray:
    """Concatenate the sub-centroids named by each code."""
    arr = np.asarray(codes, dtype=np.uint8)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != cb.s:
        raise ValueError(f"codes must have {cb.s} bytes per vector")
    if arr.size and arr.max() >= cb.n_codes:
        raise ValueError(f"code byte out of range for p={cb.p}")

    out = np.empty((arr.shape[0], cb.d), dtype=np.float32)
    for j in range(cb.s):
        out[:, j * cb.sub_d : (j + 1) * cb.sub_d] = cb.centers[j, arr[:, j]]
    return out[0] if single else out
