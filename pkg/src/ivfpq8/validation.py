"""Input validation helpers shared by the estimator and functional APIs."""

from __future__ import annotations

import numpy as np

__all__ = ["check_matrix", "check_vector"]


def check_matrix(X, name: str = "X", allow_empty: bool = False) -> np.ndarray:
    """Coerce to a C-contiguous 2-D float32 array of finite values."""
    X = np.ascontiguousarray(X, dtype=np.float32)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if not allow_empty and X.shape[0] == 0:
        raise ValueError(f"{name} must contain at least one row")
    if X.size and not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_vector(q, d: int, name: str = "q") -> np.ndarray:
    """Coerce to a finite float32 vector of length ``d``."""
    q = np.ascontiguousarray(q, dtype=np.float32).ravel()
    if q.shape[0] != d:
        raise ValueError(f"{name} has length {q.shape[0]}, expected {d}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"{name} contains non-finite values")
    return q
