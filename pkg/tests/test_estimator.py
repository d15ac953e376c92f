"""sklearn-facing estimator: params protocol, fit/kneighbors behavior."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ivfpq8.datasets import brute_force_knn, synth_gaussian_mixture
from ivfpq8.estimator import IvfPq
from ivfpq8.index import build_index
from ivfpq8.search import SearchParams, search_batch


@pytest.fixture(scope="module")
def data():
    X = synth_gaussian_mixture(3000, 16, 8, 0.05, seed=41)
    Q = synth_gaussian_mixture(50, 16, 8, 0.05, seed=42)
    return X, Q


def test_get_set_params_and_clone():
    est = IvfPq(nlist=32, pq_dims=4, lut_precision="e5m3", random_state=7)
    params = est.get_params()
    assert params["nlist"] == 32
    assert params["lut_precision"] == "e5m3"
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(nprobe=16)
    assert est.nprobe == 16


def test_kneighbors_before_fit_raises(data):
    X, Q = data
    with pytest.raises(NotFittedError):
        IvfPq().kneighbors(Q)


def test_fit_kneighbors_matches_functional_pipeline(data):
    X, Q = data
    est = IvfPq(nlist=16, pq_dims=8, pq_bits=8, nprobe=4, lut_precision="f32", random_state=5)
    dist, ids = est.fit(X).kneighbors(Q, n_neighbors=7)
    idx = build_index(X, nlist=16, s=8, p=8, seed=5)
    lists, _ = search_batch(idx, Q, SearchParams(k=7, nprobe=4, precision="f32"))
    assert np.array_equal(ids, lists.ids)
    assert np.array_equal(dist, lists.distances)
    assert est.n_features_in_ == 16


def test_kneighbors_shapes_and_return_distance(data):
    X, Q = data
    est = IvfPq(nlist=8, pq_dims=4, nprobe=8, random_state=1).fit(X)
    out = est.kneighbors(Q, n_neighbors=3, return_distance=False)
    assert out.shape == (50, 3)
    dist, ids = est.kneighbors(Q, n_neighbors=3)
    assert dist.shape == ids.shape == (50, 3)
    assert np.all(np.diff(dist, axis=1) >= 0)


def test_score_against_ground_truth(data):
    X, Q = data
    gt = brute_force_knn(X, Q, k=10)
    est = IvfPq(nlist=8, pq_dims=8, nprobe=8, random_state=2).fit(X)
    s = est.score(Q, gt.ids)
    assert 0.5 < s <= 1.0


def test_validates_input(data):
    X, _ = data
    est = IvfPq(nlist=4, pq_dims=4, random_state=0)
    with pytest.raises(ValueError, match="2-dimensional"):
        est.fit(np.zeros(10, dtype=np.float32))
    est.fit(X)
    with pytest.raises(ValueError, match="non-finite"):
        est.kneighbors(np.full((1, 16), np.nan, dtype=np.float32))
