"""Dataset IO, synthetic generation, and the brute-force k-NN oracle."""

import numpy as np
import pytest

from ivfpq8.datasets import (
    NeighborLists,
    brute_force_knn,
    read_bvecs,
    read_fvecs,
    read_ivecs,
    read_vectors,
    squared_l2_to_all,
    synth_gaussian_mixture,
    write_fvecs,
    write_ivecs,
)


def test_fvecs_roundtrip(tmp_path):
    path = tmp_path / "v.fvecs"
    X = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.float32)
    write_fvecs(path, X)
    back = read_fvecs(path)
    assert back.shape == (2, 2)
    assert np.array_equal(back, X)


def test_fvecs_layout_is_bit_exact(tmp_path):
    path = tmp_path / "v.fvecs"
    write_fvecs(path, np.array([[1.5, -2.25, 0.1]], dtype=np.float32))
    raw = path.read_bytes()
    assert len(raw) == 4 + 3 * 4
    assert int.from_bytes(raw[:4], "little") == 3
    assert np.frombuffer(raw[4:], dtype="<f4")[0] == np.float32(1.5)


def test_empty_file_warns_and_returns_0x0(tmp_path):
    path = tmp_path / "empty.fvecs"
    path.write_bytes(b"")
    with pytest.warns(UserWarning):
        X = read_fvecs(path)
    assert X.shape == (0, 0)


def test_fvecs_rejects_inconsistent_dimensions(tmp_path):
    path = tmp_path / "bad.fvecs"
    rec1 = np.int32(2).tobytes() + np.float32([1, 2]).tobytes()
    rec2 = np.int32(3).tobytes() + np.float32([1, 2, 3]).tobytes()
    # same total size as two d=2 records plus one float: force mismatch visibly
    path.write_bytes(rec1 + rec2 + b"\0" * 0)
    with pytest.raises(ValueError):
        read_fvecs(path)


def test_fvecs_rejects_truncation_and_bad_dim(tmp_path):
    path = tmp_path / "trunc.fvecs"
    path.write_bytes(np.int32(2).tobytes() + np.float32([1.0]).tobytes())
    with pytest.raises(ValueError, match="truncated"):
        read_fvecs(path)
    path.write_bytes(np.int32(-1).tobytes() + b"\0" * 8)
    with pytest.raises(ValueError, match="invalid leading dimension"):
        read_fvecs(path)


def test_bvecs_widens_exactly(tmp_path):
    path = tmp_path / "v.bvecs"
    payload = np.int32(4).tobytes() + bytes([0, 1, 128, 255])
    path.write_bytes(payload * 2)
    X = read_bvecs(path)
    assert X.dtype == np.float32
    assert np.array_equal(X, np.float32([[0, 1, 128, 255]] * 2))


def test_ivecs_roundtrip_random_lists(tmp_path):
    rng = np.random.default_rng(0)
    ids = rng.integers(0, 10_000, size=(50, 7))
    path = tmp_path / "n.ivecs"
    write_ivecs(path, NeighborLists(ids=ids))
    back = read_ivecs(path)
    assert np.array_equal(back.ids, ids)


def test_read_vectors_dispatch(tmp_path):
    path = tmp_path / "v.fvecs"
    write_fvecs(path, np.zeros((1, 2), dtype=np.float32))
    assert read_vectors(path).shape == (1, 2)
    with pytest.raises(ValueError, match="unknown vector container"):
        read_vectors(tmp_path / "v.txt")


def test_synth_zero_spread_single_component_is_constant():
    X = synth_gaussian_mixture(100, 4, 1, 0.0, seed=7)
    assert X.shape == (100, 4)
    assert np.all(X == X[0])


def test_synth_deterministic_under_seed():
    a = synth_gaussian_mixture(500, 8, 4, 0.1, seed=3)
    b = synth_gaussian_mixture(500, 8, 4, 0.1, seed=3)
    assert np.array_equal(a, b)
    c = synth_gaussian_mixture(500, 8, 4, 0.1, seed=4)
    assert not np.array_equal(a, c)


def test_synth_rejects_bad_sizes():
    with pytest.raises(ValueError):
        synth_gaussian_mixture(0, 4, 1, 0.1, seed=0)
    with pytest.raises(ValueError):
        synth_gaussian_mixture(10, 4, 0, 0.1, seed=0)


def test_brute_force_hand_example():
    base = np.float32([[0, 0], [1, 0], [3, 0]])
    nl = brute_force_knn(base, np.float32([[0.9, 0.0]]), k=2)
    assert nl.ids.tolist() == [[1, 0]]
    assert np.allclose(nl.distances, [[0.01, 0.81]], atol=1e-7)


def test_brute_force_exact_match_is_rank_one():
    rng = np.random.default_rng(5)
    base = rng.standard_normal((50, 6)).astype(np.float32)
    nl = brute_force_knn(base, base[17:18], k=1)
    assert nl.ids[0, 0] == 17
    assert nl.distances[0, 0] == 0.0


def test_brute_force_ties_break_by_lower_id():
    base = np.float32([[1, 0], [1, 0], [1, 0], [2, 0]])
    nl = brute_force_knn(base, np.float32([[0, 0]]), k=3)
    assert nl.ids.tolist() == [[0, 1, 2]]


def test_brute_force_against_full_sort_reference():
    rng = np.random.default_rng(11)
    base = rng.standard_normal((200, 8)).astype(np.float32)
    queries = rng.standard_normal((10, 8)).astype(np.float32)
    nl = brute_force_knn(base, queries, k=5)
    for i, q in enumerate(queries):
        # independent route: float64 full distance matrix + stable sort
        d2 = ((base.astype(np.float64) - q.astype(np.float64)) ** 2).sum(axis=1)
        expect = np.argsort(d2, kind="stable")[:5]
        assert np.array_equal(nl.ids[i], expect)
        assert np.all(np.diff(nl.distances[i]) >= 0)


def test_brute_force_self_recall_is_exactly_one():
    from ivfpq8.search import recall

    rng = np.random.default_rng(2)
    base = rng.standard_normal((100, 4)).astype(np.float32)
    queries = rng.standard_normal((20, 4)).astype(np.float32)
    a = brute_force_knn(base, queries, k=7)
    b = brute_force_knn(base, queries, k=7)
    assert np.array_equal(a.ids, b.ids)
    assert recall(a, b)[1] == 1.0


def test_brute_force_validates_inputs():
    base = np.zeros((3, 2), dtype=np.float32)
    with pytest.raises(ValueError, match="k=4 exceeds"):
        brute_force_knn(base, np.zeros((1, 2), dtype=np.float32), k=4)
    with pytest.raises(ValueError, match="dimension mismatch"):
        brute_force_knn(base, np.zeros((1, 3), dtype=np.float32), k=1)


def test_squared_l2_accumulates_in_float32_dimension_order():
    # documented summation order: sequential over dimensions in float32
    base = np.float32([[1e8, 1.0, -1e8]])
    q = np.float32([0.0, 0.0, 0.0])
    acc = np.float32(0.0)
    for v in [1e8, 1.0, -1e8]:
        acc = np.float32(acc + np.float32(v) * np.float32(v))
    assert squared_l2_to_all(base, q)[0] == acc
