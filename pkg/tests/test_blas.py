import numpy as np
import pytest
from oracles import X, Z, dense, dense_mpo, interleave, random_mpo

from ttlab.blas import (
    apply,
    combine,
    expectation_local,
    expectation_mpo,
    hadamard,
    mpo_from_diagonal_mps,
    mps_tensor_product,
    mps_tensor_sum,
    scprod,
    simplify,
    simplify_mpo,
    two_site_linear_form,
    two_site_quadratic_form,
)
from ttlab.calculus import mpo_weighted_shifts
from ttlab.core import (
    NO_TRUNCATION,
    Method,
    MPO,
    MPOList,
    MPOSum,
    MPS,
    MPSSum,
    ShapeError,
    Strategy,
    isometry_residuals,
    mpo_identity,
    mpo_to_dense,
    product_state,
    random_uniform_mps,
)

SVD = Strategy(method=Method.SVD_TRUNCATE)
VAR = Strategy(method=Method.VARIATIONAL)


def rand(L, chi, seed):
    return random_uniform_mps(L, 2, chi, seed=seed, complex_values=True)


def basis(n, i):
    return product_state([[1 - b, b] for b in map(int, format(i, f"0{n}b"))])


@pytest.mark.parametrize("st", [SVD, VAR])
def test_combine_examples(st):
    v = rand(6, 3, 1)
    np.testing.assert_allclose(dense(combine([1, 1], [v, v], st)), 2 * dense(v), atol=1e-12)
    assert np.linalg.norm(dense(combine([1, -1], [v, v], st))) <= 1e-12
    us = [rand(6, 3, s) for s in range(3)]
    w = [0.5, -1j, 2.0]
    ref = sum(c * dense(u) for c, u in zip(w, us))
    np.testing.assert_allclose(dense(combine(w, us, st)), ref, atol=1e-10)


def test_combine_errors():
    v = rand(4, 2, 0)
    with pytest.raises(ShapeError):
        combine([], [])
    with pytest.raises(ShapeError):
        combine([1.0, 2.0], [v])


def test_simplify_exact_rank_and_bond_cap():
    v = rand(8, 3, 2)
    target = MPSSum([1.0, 1.0], [v, v])
    out = simplify(target, Strategy(max_bond=3))
    assert np.linalg.norm(dense(out) - 2 * dense(v)) <= 1e-10
    for st in (SVD.replace(max_bond=2), VAR.replace(max_bond=2)):
        assert max(simplify(rand(8, 8, 3), st).bond_dimensions()) <= 2


def test_simplify_variational_matches_single_cut_svd_optimum():
    # one cut: the best rank-4 approximation is the SVD truncation
    rng = np.random.default_rng(5)
    M = rng.normal(size=(8, 8))
    v = MPS([M.reshape(1, 8, 8), np.eye(8).reshape(8, 8, 1)])
    s = np.linalg.svd(M, compute_uv=False)
    best = np.sqrt(np.sum(s[4:] ** 2))
    out = simplify(v, VAR.replace(max_bond=4, max_sweeps=10))
    assert abs(out.error - best) <= 0.1 * best
    assert np.linalg.norm(dense(out) - dense(v)) <= out.error + 1e-12


def test_simplify_error_matches_distance():
    v = rand(8, 8, 7)
    for st in (SVD.replace(max_bond=3), VAR.replace(max_bond=3)):
        out = simplify(v, st)
        d = np.linalg.norm(dense(out) - dense(v))
        assert d <= out.error * (1 + 1e-10) + 1e-12
        if st.method is Method.SVD_TRUNCATE:
            assert abs(d - out.error) <= 1e-10
        assert max(isometry_residuals(out)) <= 1e-12


def test_simplify_zero_target():
    v = rand(5, 3, 1)
    z = simplify(MPSSum([1.0, -1.0], [v, v]))
    assert z.bond_dimensions() == [1] * 4
    assert np.abs(dense(z)).max() == 0
    assert z.error <= 1e-12 * np.linalg.norm(dense(v))


def test_simplify_normalize_flag():
    v = rand(5, 3, 4)
    out = simplify(v, Strategy(normalize=True))
    assert np.linalg.norm(dense(out)) == pytest.approx(1.0)


def test_simplify_mpo_examples(rng):
    two = simplify_mpo(MPOSum([1.0, 1.0], [mpo_identity(4), mpo_identity(4)]))
    np.testing.assert_allclose(mpo_to_dense(two), 2 * np.eye(16), atol=1e-13)
    assert two.bond_dimensions() == [1, 1, 1]
    A, B = random_mpo(4, 2, rng), random_mpo(4, 2, rng)
    S = simplify_mpo(MPOSum([1.0, -0.5], [A, B]))
    np.testing.assert_allclose(mpo_to_dense(S), dense_mpo(A) - 0.5 * dense_mpo(B), atol=1e-12)
    H = simplify_mpo(MPOSum([1.0, 1.0], [A, A.dagger()]))
    M = mpo_to_dense(H)
    assert np.abs(M - M.conj().T).max() <= 1e-12 * np.abs(M).max()


def test_apply_examples(rng):
    v = rand(6, 3, 0)
    np.testing.assert_allclose(dense(apply(mpo_identity(6), v)), dense(v), atol=1e-12)
    n = 4
    out = apply(mpo_weighted_shifts(n, {1: 1.0}, "periodic"), basis(n, 0), NO_TRUNCATION)
    np.testing.assert_allclose(dense(out), np.eye(2**n)[2**n - 1], atol=1e-14)
    W = random_mpo(6, 3, rng)
    np.testing.assert_allclose(dense(apply(W, v, NO_TRUNCATION)), dense_mpo(W) @ dense(v), atol=1e-10)


def test_apply_sums_and_lists(rng):
    A, B = random_mpo(5, 2, rng), random_mpo(5, 2, rng)
    u, v = rand(5, 2, 1), rand(5, 3, 2)
    dA, dB = dense_mpo(A), dense_mpo(B)
    got = apply(MPOSum([1.0, 2j], [A, B]), MPSSum([1.0, -1.0], [u, v]), NO_TRUNCATION)
    np.testing.assert_allclose(dense(got), (dA + 2j * dB) @ (dense(u) - dense(v)), atol=1e-10)
    got = apply(MPOList([A, B]), u, NO_TRUNCATION)
    np.testing.assert_allclose(dense(got), dB @ dA @ dense(u), atol=1e-10)
    with pytest.raises(ShapeError):
        apply(random_mpo(4, 2, rng), u)
    with pytest.raises(TypeError):
        apply(np.eye(2), u)


def test_apply_error_propagates_input_error(rng):
    W = random_mpo(4, 2, rng)
    v = rand(4, 2, 3).with_error(1e-3)
    out = apply(W, v, NO_TRUNCATION)
    assert out.error >= 1e-3 * np.linalg.norm(dense_mpo(W), 2) * (1 - 1e-12)


def test_scprod_examples():
    v = rand(6, 3, 5)
    assert scprod(v, v) == pytest.approx(np.linalg.norm(dense(v)) ** 2)
    assert scprod(basis(4, 0), basis(4, 1)) == 0
    u = rand(6, 2, 6)
    assert scprod(u, v) == pytest.approx(np.vdot(dense(u), dense(v)))
    assert scprod(u, v) == pytest.approx(np.conj(scprod(v, u)))


def test_expectation_local_examples():
    assert expectation_local(basis(1, 0), Z, 0) == pytest.approx(1.0)
    assert expectation_local(basis(2, 1), Z, 0, Z, 1) == pytest.approx(-1.0)
    v = rand(4, 3, 8)
    ref = np.vdot(dense(v), np.kron(np.kron(np.eye(2), X), np.eye(4)) @ dense(v))
    assert expectation_local(v, X, 1) == pytest.approx(ref)
    ref2 = np.vdot(dense(v), np.kron(np.kron(Z, np.eye(4)), X) @ dense(v))
    assert expectation_local(v, Z, 0, X, 3) == pytest.approx(ref2)


def test_expectation_mpo_examples(rng):
    u, v = rand(5, 2, 1), rand(5, 3, 2)
    assert expectation_mpo(mpo_identity(5), u, v) == pytest.approx(scprod(u, v))
    ones = product_state([[1, 1]] * 5)
    assert expectation_mpo(mpo_from_diagonal_mps(ones), u, v) == pytest.approx(scprod(u, v))
    W = random_mpo(5, 3, rng)
    assert expectation_mpo(W, u, v) == pytest.approx(np.vdot(dense(u), dense_mpo(W) @ dense(v)))
    assert expectation_mpo(W, u) == pytest.approx(np.vdot(dense(u), dense_mpo(W) @ dense(u)))


def test_hadamard_examples():
    v = rand(5, 3, 1)
    ones = product_state([[1, 1]] * 5)
    np.testing.assert_allclose(dense(hadamard(v, ones)), dense(v))
    for i in range(4):
        for j in range(4):
            h = dense(hadamard(basis(2, i), basis(2, j)))
            np.testing.assert_array_equal(h, np.eye(4)[i] * (i == j))
    u = rand(5, 2, 2)
    h = hadamard(u, v)
    assert h.bond_dimensions() == [a * b for a, b in zip(u.bond_dimensions(), v.bond_dimensions())]
    np.testing.assert_allclose(dense(h), dense(u) * dense(v), atol=1e-13)


def test_tensor_product_orders():
    a, b = product_state([[1, 2]]), product_state([[3, 5]])
    np.testing.assert_array_equal(dense(mps_tensor_product([a, b])), [3, 5, 6, 10])
    u, v = rand(2, 2, 1), rand(2, 2, 2)
    pB = mps_tensor_product([u, v], "B")
    # site order (u1, v1, u2, v2)
    np.testing.assert_allclose(dense(pB), interleave(dense(u), dense(v), 2), atol=1e-14)
    with pytest.raises(ShapeError):
        mps_tensor_product([u, rand(3, 2, 0)], "B")
    with pytest.raises(ValueError):
        mps_tensor_product([u, v], "C")


def test_tensor_sum_examples():
    from ttlab.funcrep import RegularInterval, mps_interval

    iv = RegularInterval(0.0, 1.0, 4)
    x = mps_interval(iv)
    s = mps_tensor_sum([x, x])
    grid = iv.points()
    np.testing.assert_allclose(dense(s), (grid[:, None] + grid[None, :]).ravel(), atol=1e-14)
    assert mps_tensor_sum([x]) is x
    c = product_state([[2, 2]] * 3)
    np.testing.assert_allclose(dense(mps_tensor_sum([c, c])), np.full(64, 16.0))
    sB = mps_tensor_sum([x, x], "B")
    ref = interleave(grid, np.ones(16), 4) + interleave(np.ones(16), grid, 4)
    np.testing.assert_allclose(dense(sB), ref, atol=1e-14)


def test_mpo_from_diagonal_mps_examples():
    ones = product_state([[1, 1]] * 3)
    np.testing.assert_array_equal(mpo_to_dense(mpo_from_diagonal_mps(ones)), np.eye(8))
    np.testing.assert_array_equal(mpo_to_dense(mpo_from_diagonal_mps(basis(3, 0))), np.diag(np.eye(8)[0]))
    v, w = rand(4, 3, 1), rand(4, 2, 2)
    D = mpo_from_diagonal_mps(v)
    assert D.bond_dimensions() == v.bond_dimensions()
    np.testing.assert_allclose(dense(apply(D, w, NO_TRUNCATION)), dense(hadamard(v, w)), atol=1e-12)


def test_two_site_forms(rng):
    v, w = rand(6, 3, 1), rand(6, 2, 2)
    W = random_mpo(6, 2, rng)
    ref_lin = np.vdot(dense(v), dense(w))
    ref_quad = np.vdot(dense(v), dense_mpo(W) @ dense(w))
    for n in range(5):
        lf = two_site_linear_form(v, w, n)
        assert np.vdot(lf.a, lf.f) == pytest.approx(ref_lin, rel=1e-12)
        qf = two_site_quadratic_form(v, W, w, n)
        assert np.vdot(qf.a.ravel(), qf.matrix() @ qf.b.ravel()) == pytest.approx(ref_quad, rel=1e-12)
        assert np.vdot(qf.a.ravel(), qf.apply(qf.b).ravel()) == pytest.approx(ref_quad, rel=1e-12)
    gram = two_site_quadratic_form(v, mpo_identity(6), v, 2).matrix()
    assert np.linalg.eigvalsh((gram + gram.conj().T) / 2).min() >= -1e-12


def test_two_site_form_updates_move_site():
    v, w = rand(5, 2, 1), rand(5, 2, 2)
    lf = two_site_linear_form(v, w, 0)
    ref = np.vdot(dense(v), dense(w))
    for _ in range(3):
        lf.update_right(lf.bra[lf.site], lf.bra[lf.site + 1])
        assert np.vdot(lf.a, lf.f) == pytest.approx(ref, rel=1e-12)
    for _ in range(3):
        lf.update_left(lf.bra[lf.site], lf.bra[lf.site + 1])
        assert np.vdot(lf.a, lf.f) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValueError):
        two_site_linear_form(v, w, 4)


def test_apply_to_product_of_local_ops():
    op = MPO([X.reshape(1, 2, 2, 1).astype(complex), Z.reshape(1, 2, 2, 1).astype(complex)])
    v = rand(2, 2, 3)
    np.testing.assert_allclose(dense(apply(op, v, NO_TRUNCATION)), np.kron(X, Z) @ dense(v), atol=1e-14)
