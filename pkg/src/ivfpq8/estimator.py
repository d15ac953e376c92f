"""scikit-learn style front end for the IVFPQ searcher."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .index import build_index
from .search import SearchParams, search_batch
from .validation import check_matrix

__all__ = ["IvfPq"]


class IvfPq(BaseEstimator):
    """Approximate nearest-neighbor search with an IVFPQ index.

    fit() clusters the data, trains the product-quantization codebook
    on residuals, and compresses every row; kneighbors() answers
    queries through per-cluster lookup tables stored in the chosen
    precision.  Returned distances are squared L2 between the query
    residual and the compressed representation (ADC), so they are
    approximate.

    Parameters mirror the index/search pipeline: nlist coarse clusters,
    pq_dims sub-codebooks of pq_bits each, nprobe clusters probed per
    query, lut_precision in {"f32", "f16", "e5m3", "e4m4"}.
    """

    def __init__(
        self,
        nlist: int = 64,
        pq_dims: int = 8,
        pq_bits: int = 8,
        n_neighbors: int = 10,
        nprobe: int = 8,
        lut_precision: str = "f32",
        random_state: int = 0,
    ):
        self.nlist = nlist
        self.pq_dims = pq_dims
        self.pq_bits = pq_bits
        self.n_neighbors = n_neighbors
        self.nprobe = nprobe
        self.lut_precision = lut_precision
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_matrix(X, "X")
        self.index_ = build_index(
            X, nlist=self.nlist, s=self.pq_dims, p=self.pq_bits, seed=self.random_state
        )
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "index_"):
            raise NotFittedError("this IvfPq instance is not fitted yet; call fit first")

    def kneighbors(
        self,
        X,
        n_neighbors: int | None = None,
        return_distance: bool = True,
    ):
        """Ids (and squared ADC distances) of the approximate neighbors.

        Rows that reach fewer than n_neighbors candidates are padded
        with id -1 and +inf distance.
        """
        self._check_fitted()
        X = check_matrix(X, "X")
        k = self.n_neighbors if n_neighbors is None else n_neighbors
        params = SearchParams(k=k, nprobe=self.nprobe, precision=self.lut_precision)
        lists, _ = search_batch(self.index_, X, params)
        if return_distance:
            return lists.distances, lists.ids
        return lists.ids

    def score(self, X, y):
        """Mean recall of kneighbors(X) against ground-truth id rows y."""
        self._check_fitted()
        y = np.asarray(y)
        ids = self.kneighbors(X, n_neighbors=y.shape[1], return_distance=False)
        hits = (ids[:, :, None] == y[:, None, :]) & (ids[:, :, None] >= 0)
        return float(hits.any(axis=2).sum(axis=1).mean() / y.shape[1])
