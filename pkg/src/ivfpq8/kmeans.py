"""Lloyd k-means with k-means++ seeding and empty-cluster repair.

Deterministic under seed: initialization draws from a seeded generator,
assignment breaks distance ties toward the lower cluster id, and all
reductions run in a fixed order, so repeated runs produce identical
centroids and assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import check_matrix

__all__ = ["KMeansParams", "KMeansResult", "kmeans", "train_coarse", "assign_to_centroids"]

_ASSIGN_CHUNK = 16384


@dataclass(frozen=True)
class KMeansParams:
    """k: cluster count; tol: centroid-shift threshold relative to the
    RMS norm of the training rows."""

    k: int
    max_iters: int = 25
    seed: int = 0
    tol: float = 1e-4

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia_history: list[float] = field(default_factory=list)
    n_iters: int = 0


def assign_to_centroids(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per row under squared L2, ties to the lower id.

    Returns (assignments, squared distances).  Distances come from the
    expanded form ||x||^2 - 2 x.c + ||c||^2 and are clipped at zero.
    """
    n = X.shape[0]
    assign = np.empty(n, dtype=np.int64)
    d2 = np.empty(n, dtype=np.float32)
    c_sq = np.einsum("ij,ij->i", centroids, centroids)
    for lo in range(0, n, _ASSIGN_CHUNK):
        hi = min(lo + _ASSIGN_CHUNK, n)
        chunk = X[lo:hi]
        dist = chunk @ centroids.T
        dist *= -2.0
        dist += c_sq[None, :]
        dist += np.einsum("ij,ij->i", chunk, chunk)[:, None]
        np.maximum(dist, 0.0, out=dist)
        assign[lo:hi] = np.argmin(dist, axis=1)
        d2[lo:hi] = dist[np.arange(hi - lo), assign[lo:hi]]
    return assign, d2


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: greedy D^2-weighted draws from a seeded RNG."""
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float32)
    first = int(rng.integers(n))
    centroids[0] = X[first]
    closest = np.einsum("ij,ij->i", X - centroids[0], X - centroids[0])
    for i in range(1, k):
        total = float(closest.sum(dtype=np.float64))
        if total <= 0.0:
            pick = int(rng.integers(n))
        else:
            cum = np.cumsum(closest.astype(np.float64))
            pick = int(np.searchsorted(cum, rng.random() * total, side="right"))
            pick = min(pick, n - 1)
        centroids[i] = X[pick]
        diff = X - centroids[i]
        np.minimum(closest, np.einsum("ij,ij->i", diff, diff), out=closest)
    return centroids


def _repair_empty(
    X: np.ndarray,
    centroids: np.ndarray,
    assign: np.ndarray,
    d2: np.ndarray,
    k: int,
) -> None:
    """Seed each empty cluster with the point farthest from its centroid.

    Donor points are taken only from clusters that keep at least one
    member, so repair never re-empties a cluster; since singleton
    clusters sit at distance zero from their own centroid this only
    excludes degenerate all-duplicate ties.  Mutates in place.
    """
    counts = np.bincount(assign, minlength=k)
    empties = np.flatnonzero(counts == 0)
    if empties.size == 0:
        return
    candidates = np.where(counts[assign] >= 2, d2, -1.0)
    for j in empties:
        p = int(np.argmax(candidates))
        if candidates[p] < 0:
            break
        old = assign[p]
        centroids[j] = X[p]
        assign[p] = j
        d2[p] = 0.0
        counts[old] -= 1
        counts[j] += 1
        candidates[p] = -1.0
        if counts[old] < 2:
            candidates[assign == old] = -1.0


def _cluster_means(X: np.ndarray, assign: np.ndarray, k: int) -> np.ndarray:
    """Per-cluster means in float64, reduced in sorted-id order.

    Requires every cluster nonempty (guaranteed after repair); the fixed
    reduction order keeps results reproducible regardless of threading.
    """
    order = np.argsort(assign, kind="stable")
    sums = np.add.reduceat(
        X[order].astype(np.float64),
        np.searchsorted(assign[order], np.arange(k), side="left"),
        axis=0,
    )
    counts = np.bincount(assign, minlength=k).astype(np.float64)
    return (sums / counts[:, None]).astype(np.float32)


def _exact_inertia(X: np.ndarray, centroids: np.ndarray, assign: np.ndarray) -> float:
    diff = (X - centroids[assign]).astype(np.float64)
    return float(np.einsum("ij,ij->", diff, diff))


def kmeans(data, params: KMeansParams) -> KMeansResult:
    """Lloyd iterations until max_iters or the centroid shift drops below tol.

    On return every centroid has at least one assigned point and
    assignments are nearest-centroid against the returned centroids
    (up to empty-cluster repair of exact-tie degeneracies).
    """
    X = check_matrix(data, "data")
    k = params.k
    if X.shape[0] < k:
        raise ValueError(f"need at least k={k} rows, got {X.shape[0]}")

    rng = np.random.default_rng(params.seed)
    centroids = _kmeans_pp_init(X, k, rng)
    scale = float(np.sqrt(np.einsum("ij,ij->", X, X, dtype=np.float64) / X.shape[0]))
    shift_limit = params.tol * max(scale, np.finfo(np.float32).tiny)

    result = KMeansResult(centroids=centroids, assignments=np.zeros(X.shape[0], dtype=np.int64))
    for _ in range(params.max_iters):
        assign, d2 = assign_to_centroids(X, centroids)
        _repair_empty(X, centroids, assign, d2, k)
        result.inertia_history.append(_exact_inertia(X, centroids, assign))

        new_centroids = _cluster_means(X, assign, k)

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1).max()))
        centroids = new_centroids
        result.n_iters += 1
        if shift <= shift_limit:
            break

    assign, d2 = assign_to_centroids(X, centroids)
    _repair_empty(X, centroids, assign, d2, k)
    result.inertia_history.append(_exact_inertia(X, centroids, assign))
    result.centroids = centroids
    result.assignments = assign
    return result


def train_coarse(data, nlist: int, seed: int) -> np.ndarray:
    """Coarse centroids for the inverted file: k-means with fixed defaults."""
    params = KMeansParams(k=nlist, max_iters=25, seed=seed, tol=1e-4)
    return kmeans(data, params).centroids
