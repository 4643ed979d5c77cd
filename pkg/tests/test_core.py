import numpy as np
import pytest
from oracles import Z, dense, dense_mpo, random_mpo

from ttlab.core import (
    DEFAULT_STRATEGY,
    NO_TRUNCATION,
    CanonicalMPS,
    CapacityError,
    Method,
    MPOList,
    MPOSum,
    MPS,
    MPSSum,
    ShapeError,
    Strategy,
    canonicalize,
    distance,
    isometry_residuals,
    join_mps,
    mpo_from_local_operators,
    mpo_identity,
    mpo_to_dense,
    mps_from_dense,
    mps_to_dense,
    norm,
    product_state,
    random_uniform_mps,
    schmidt_split,
)


def test_strategy_defaults_and_validation():
    assert DEFAULT_STRATEGY.method is Method.VARIATIONAL
    assert DEFAULT_STRATEGY.tolerance == 1e-12
    assert DEFAULT_STRATEGY.max_bond is None and DEFAULT_STRATEGY.max_sweeps == 4
    assert not DEFAULT_STRATEGY.normalize
    assert Strategy(method="svd").method is Method.SVD_TRUNCATE
    for bad in ({"tolerance": -1}, {"tolerance": np.inf}, {"max_bond": 0}, {"max_sweeps": 0}):
        with pytest.raises(ValueError):
            Strategy(**bad)


def test_mps_bond_checks():
    with pytest.raises(ShapeError):
        MPS([np.ones((1, 2, 2)), np.ones((3, 2, 1))])
    with pytest.raises(ShapeError):
        MPS([np.ones((2, 2, 1))])


def test_from_dense_examples(rng):
    m = mps_from_dense([1, 0, 0, 0], [2, 2])
    assert len(m) == 2 and m.bond_dimensions() == [1]
    np.testing.assert_allclose(mps_to_dense(m), [1, 0, 0, 0])
    assert mps_from_dense([1, 0, 0, 1], [2, 2]).bond_dimensions() == [2]
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    m = mps_from_dense(v, [2] * 4)
    assert np.linalg.norm(mps_to_dense(m) - v) <= 1e-12
    assert m.center == 0
    assert max(isometry_residuals(m)) <= 1e-12


def test_from_dense_mixed_radix(rng):
    v = rng.normal(size=24)
    m = mps_from_dense(v, [2, 3, 4])
    assert m.physical_dimensions() == [2, 3, 4]
    np.testing.assert_allclose(mps_to_dense(m), v, atol=1e-12)
    with pytest.raises(ShapeError):
        mps_from_dense(v, [2, 2, 2])
    with pytest.raises(ShapeError):
        mps_from_dense(np.ones(6))


def test_to_dense_guards():
    e0 = product_state([[1, 0]] * 3)
    np.testing.assert_array_equal(mps_to_dense(e0), np.eye(8)[0])
    with pytest.raises(TypeError):
        mps_to_dense(MPSSum([1.0], [e0]))
    with pytest.raises(CapacityError):
        mps_to_dense(e0, guard=4)
    with pytest.raises(CapacityError):
        mpo_to_dense(mpo_identity(3), guard=4)


def test_schmidt_split_examples(rng):
    theta = np.eye(2) / np.sqrt(2)
    A, B, err = schmidt_split(theta, NO_TRUNCATION)
    assert err == 0 and A.shape[1] == 2
    np.testing.assert_allclose(A @ B, theta, atol=1e-15)
    _, _, err = schmidt_split(theta, Strategy(tolerance=0, max_bond=1))
    assert err == pytest.approx(1 / np.sqrt(2))
    M = rng.normal(size=(4, 4))
    s = np.linalg.svd(M, compute_uv=False)
    for sweep in ("right", "left"):
        A, B, err = schmidt_split(M, Strategy(tolerance=0, max_bond=2), sweep)
        assert abs(np.linalg.norm(A @ B - M) - err) <= 1e-12
        assert err == pytest.approx(np.sqrt(np.sum(s[2:] ** 2)), rel=1e-12)
        iso = A.conj().T @ A if sweep == "right" else B @ B.conj().T
        np.testing.assert_allclose(iso, np.eye(2), atol=1e-12)


def test_schmidt_split_relative_tolerance():
    theta = np.diag([1.0, 1e-3, 1e-7])
    _, _, err = schmidt_split(theta, Strategy(tolerance=1e-5))
    assert err == pytest.approx(1e-7)


def test_canonicalize_error_equals_distance():
    for seed in range(5):
        v = random_uniform_mps(8, 2, 8, seed=seed)
        for center in (0, 3, 7):
            c = canonicalize(v, center, Strategy(max_bond=4))
            assert max(c.bond_dimensions()) <= 4
            d = np.linalg.norm(dense(c) - dense(v))
            assert abs(d - c.error) <= 1e-10 * max(1.0, np.linalg.norm(dense(v)))
            assert max(isometry_residuals(c)) <= 1e-12


def test_canonicalize_move_center_round_trip():
    v = random_uniform_mps(6, 2, 4, seed=3)
    c = canonicalize(v, 0, NO_TRUNCATION)
    back = canonicalize(canonicalize(c, 5, NO_TRUNCATION), 0, NO_TRUNCATION)
    assert np.abs(dense(back) - dense(v)).max() <= 1e-12
    again = canonicalize(back, 0, NO_TRUNCATION)
    for a, b in zip(back.tensors, again.tensors):
        np.testing.assert_allclose(a, b, atol=1e-14)
    with pytest.raises(ValueError):
        canonicalize(v, 6)


def test_norm_examples():
    e0 = product_state([[1, 0]] * 4)
    assert norm(e0) == pytest.approx(1.0)
    v = random_uniform_mps(6, 2, 3, seed=1, complex_values=True)
    assert norm(v * 2) == pytest.approx(2 * norm(v))
    assert norm(v) == pytest.approx(np.linalg.norm(dense(v)), rel=1e-12)
    c = canonicalize(v, 2)
    assert c.norm() == pytest.approx(np.linalg.norm(c.tensors[2]), rel=1e-14)
    assert norm(c) == pytest.approx(np.linalg.norm(dense(v)), rel=1e-12)


def test_scalar_multiplication_spreads_factor():
    v = random_uniform_mps(5, 2, 2, seed=2)
    w = v * 32.0
    np.testing.assert_allclose(dense(w), 32 * dense(v))
    scales = [np.abs(a).max() / np.abs(b).max() for a, b in zip(w.tensors, v.tensors)]
    assert max(scales) < 32


def test_random_uniform_mps_examples():
    p = random_uniform_mps(3, 2, 1, seed=0)
    assert p.bond_dimensions() == [1, 1]
    a, b = random_uniform_mps(6, 3, 4, seed=9), random_uniform_mps(6, 3, 4, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(a.tensors, b.tensors))
    m = random_uniform_mps(8, 2, 4, seed=1)
    assert m.bond_dimensions() == [2, 4, 4, 4, 4, 4, 2]
    assert canonicalize(m, 0).norm() > 0
    with pytest.raises(ValueError):
        random_uniform_mps(0, 2, 1)


def test_mpo_identity_and_dense(rng):
    np.testing.assert_array_equal(mpo_to_dense(mpo_identity(2)), np.eye(4))
    assert mpo_identity(4).bond_dimensions() == [1, 1, 1]
    sz = mpo_from_local_operators([Z, np.eye(2)])
    np.testing.assert_array_equal(mpo_to_dense(sz), np.kron(np.diag([1, -1]), np.eye(2)))
    W = random_mpo(4, 3, rng)
    np.testing.assert_allclose(mpo_to_dense(W), dense_mpo(W), atol=1e-14)


def test_mps_sum_and_join(rng):
    u, v = random_uniform_mps(4, 2, 2, seed=1), random_uniform_mps(4, 2, 3, seed=2)
    s = MPSSum([2.0, -1j], [u, v])
    np.testing.assert_allclose(s.to_vector(), 2 * dense(u) - 1j * dense(v), atol=1e-14)
    j = join_mps([2.0, -1j], [u, v])
    assert j.bond_dimensions() == [a + b for a, b in zip(u.bond_dimensions(), v.bond_dimensions())]
    np.testing.assert_allclose(dense(j), s.to_vector(), atol=1e-14)
    s2 = s + u
    assert len(s2.weights) == 3
    with pytest.raises((ValueError, ShapeError)):
        MPSSum([], [])
    with pytest.raises((ValueError, ShapeError)):
        MPSSum([1.0], [u, v])


def test_mpo_sum_list_and_dagger(rng):
    A, B = random_mpo(3, 2, rng), random_mpo(3, 2, rng)
    dA, dB = dense_mpo(A), dense_mpo(B)
    np.testing.assert_allclose(MPOSum([1.0, 2.0], [A, B]).to_matrix(), dA + 2 * dB, atol=1e-13)
    # factors are applied right to left
    np.testing.assert_allclose(MPOList([A, B]).to_matrix(), dB @ dA, atol=1e-13)
    np.testing.assert_allclose(mpo_to_dense(A.dagger()), dA.conj().T, atol=1e-14)
    s = np.linalg.svd(dA, compute_uv=False)[0]
    assert A.norm_bound() >= s * (1 - 1e-12)


def test_distance(rng):
    u, v = random_uniform_mps(5, 2, 3, seed=1), random_uniform_mps(5, 2, 3, seed=2)
    assert distance(u, v) == pytest.approx(np.linalg.norm(dense(u) - dense(v)), rel=1e-12)
    assert distance(u, u) <= 1e-7 * norm(u)


def test_canonical_mps_normalized():
    c = canonicalize(random_uniform_mps(5, 2, 3, seed=4), 2)
    n = c.normalized()
    assert isinstance(n, CanonicalMPS)
    assert np.linalg.norm(dense(n)) == pytest.approx(1.0)


def test_one_site_and_mixed_dimensions():
    v = MPS([np.arange(3.0).reshape(1, 3, 1)])
    c = canonicalize(v, 0, Strategy(tolerance=1e-3))
    np.testing.assert_allclose(dense(c), [0, 1, 2])
    m = random_uniform_mps(4, 3, 5, seed=1)
    assert m.bond_dimensions() == [3, 5, 3]
