"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Claims that the implementation cannot meet as stated are kept as strict
expected failures; they still assert the original claim.
"""

from __future__ import annotations

import csv
import io
import json
import time

import jsonschema
import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES
from oracles import X, Z, dense, dense_mpo, embed, interleave, random_mpo, tfi_dense

from ttlab import cli
from ttlab import io as ttio
from ttlab.blas import (
    apply,
    combine,
    hadamard,
    mpo_from_diagonal_mps,
    mps_tensor_product,
    mps_tensor_sum,
    scprod,
    simplify,
)
from ttlab.calculus import (
    finite_differences_mpo,
    fourier_derivative_mpo,
    fourier_interpolation,
    fd_interpolation,
    integrate_mps,
    mpo_weighted_shifts,
    quadrature_mps,
)
from ttlab.core import (
    MPO,
    NO_TRUNCATION,
    Method,
    MPS,
    Strategy,
    canonicalize,
    isometry_residuals,
    mps_from_dense,
    product_state,
    random_uniform_mps,
)
from ttlab.evolution import (
    EvolutionSpec,
    crank_nicolson_step,
    evolve,
    explicit_step,
    tdvp_step,
    trotter_step,
)
from ttlab.funcrep import (
    BlackBox,
    Interval,
    Mesh,
    OrthogonalBasis,
    RegularInterval,
    cross_interpolation,
    expansion_apply,
    mps_exp_sum,
    mps_from_polynomial,
    mps_interval,
    mps_sin,
    project_coefficients,
)
from ttlab.hamiltonians import InteractionGraph, NNHamiltonian, graph_to_mpo, tfi_mpo, tfi_nn
from ttlab.lapack import cg_solve, dmrg_min_eigen, dmrg_solve, gmres_solve, iqft, qft, qft_flip
from ttlab.schema import RESULT_SCHEMA


def report(cid: str, claim: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {cid:<4} {claim}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def rand_state(L, chi, rng) -> MPS:
    return random_uniform_mps(L, 2, chi, seed=int(rng.integers(2**31)), complex_values=True)


# --------------------------------------------------------------------------
# 1. dense-oracle equivalence of every BLAS operation


def test_c01_blas_dense_oracle():
    rng = np.random.default_rng(101)
    worst = 0.0
    for case in range(100):
        L = int(rng.integers(2, 11))
        u, v = rand_state(L, int(rng.integers(1, 5)), rng), rand_state(L, int(rng.integers(1, 5)), rng)
        du, dv = dense(u), dense(v)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        exact0 = Strategy(method=Method.VARIATIONAL, tolerance=0.0) if case % 2 else NO_TRUNCATION
        errs = [
            dense(combine([a, b], [u, v], exact0)) - (a * du + b * dv),
            dense(simplify(u, exact0)) - du,
            [scprod(u, v) - np.vdot(du, dv)],
            dense(hadamard(u, v)) - du * dv,
            dense(apply(mpo_from_diagonal_mps(u), v, NO_TRUNCATION)) - du * dv,
            dense_mpo(mpo_from_diagonal_mps(u)) - np.diag(du),
        ]
        W = random_mpo(L, int(rng.integers(1, 4)), rng)
        errs.append(dense(apply(W, u, NO_TRUNCATION)) - dense_mpo(W) @ du)
        if L >= 2:
            k = L // 2
            p, q = rand_state(k, 2, rng), rand_state(L - k, 2, rng)
            dp, dq = dense(p), dense(q)
            errs.append(dense(mps_tensor_product([p, q], "A")) - np.kron(dp, dq))
            errs.append(
                dense(mps_tensor_sum([p, q], "A"))
                - (np.kron(dp, np.ones(dq.size)) + np.kron(np.ones(dp.size), dq))
            )
            if L % 2 == 0:
                q2 = rand_state(k, 2, rng)
                errs.append(dense(mps_tensor_product([p, q2], "B")) - interleave(dp, dense(q2), k))
        scale = max(1.0, np.abs(du).max(), np.abs(dv).max())
        worst = max(worst, max(np.abs(np.asarray(e)).max() / scale for e in errs))
    report("C1", "BLAS ops equal dense oracles on 100 random cases (L<=10)", worst <= 1e-10,
           f"max deviation {worst:.2e} (tol 1e-10)")


# --------------------------------------------------------------------------
# 2. truncation-error ledger over random operation sequences


def _random_sequence(rng, L):
    state = rand_state(L, 4, rng)
    exact = dense(state)
    ops = []
    for _ in range(5):
        st = Strategy(method=Method(rng.choice(["svd", "variational"])), tolerance=float(rng.choice([0, 1e-3, 1e-2])),
                      max_bond=int(rng.integers(1, 5)))
        kind = rng.choice(["combine", "apply", "hadamard", "simplify", "scale"])
        if kind == "combine":
            w = rand_state(L, 3, rng)
            a, b = rng.normal(size=2)
            state, exact = combine([a, b], [state, w], st), a * exact + b * dense(w)
        elif kind == "apply":
            W = random_mpo(L, 2, rng)
            state, exact = apply(W, state, st), dense_mpo(W) @ exact
        elif kind == "hadamard":
            w = rand_state(L, 2, rng)
            state, exact = simplify(hadamard(state, w), st), exact * dense(w)
        elif kind == "simplify":
            state = simplify(state, st)
        else:
            c = complex(rng.normal(), rng.normal())
            state, exact = state * c, exact * c
        ops.append(kind)
    return state, exact, ops


def test_c02_truncation_error_ledger():
    rng = np.random.default_rng(202)
    ok_count, worst_ratio = 0, 0.0
    for _ in range(100):
        L = int(rng.integers(3, 9))
        state, exact, _ = _random_sequence(rng, L)
        dist = np.linalg.norm(dense(state) - exact)
        # 1e-12 relative slack absorbs round-off when no truncation happened
        bound = state.error + 1e-12 * np.linalg.norm(exact)
        ok_count += dist <= bound
        worst_ratio = max(worst_ratio, dist / bound)
    report("C2", "true distance <= reported error for random 5-op sequences", ok_count == 100,
           f"{ok_count}/100 trials, max distance/error {worst_ratio:.3f}")


# --------------------------------------------------------------------------
# 3. canonical form


def test_c03_canonical_isometries():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(60):
        L = int(rng.integers(2, 10))
        v = rand_state(L, int(rng.integers(1, 9)), rng)
        for center in {0, L - 1, int(rng.integers(L))}:
            st = Strategy(tolerance=float(rng.choice([0.0, 1e-6])), max_bond=int(rng.integers(1, 9)))
            c = canonicalize(v, center, st)
            worst = max(worst, max(isometry_residuals(c), default=0.0))
        w = rand_state(L, 3, rng)
        for method in ("svd", "variational"):
            s = simplify(combine([1.0, -0.5], [v, w], Strategy(method=Method(method), max_bond=3)))
            worst = max(worst, max(isometry_residuals(s), default=0.0))
        W = random_mpo(L, 2, rng)
        worst = max(worst, max(isometry_residuals(apply(W, v, Strategy(max_bond=4))), default=0.0))
    report("C3", "isometry residuals after canonicalize/simplify/apply", worst <= 1e-12,
           f"max residual {worst:.2e} (tol 1e-12)")


# --------------------------------------------------------------------------
# 4. DMRG ground states


def test_c04_dmrg_tfi():
    rows, ok = [], True
    for N in (4, 6, 8):
        for g in (0.5, 1.0, 1.5):
            H = tfi_mpo(N, g)
            exact = np.linalg.eigvalsh(tfi_dense(N, g))[0]
            t0 = time.perf_counter()
            E, _, _ = dmrg_min_eigen(H, random_uniform_mps(N, 2, 2, seed=N), Strategy(tolerance=1e-12, max_bond=32))
            dt = time.perf_counter() - t0
            err = abs(E - exact)
            ok &= err <= 1e-8 and dt < 10.0
            rows.append(f"N={N} g={g}: {err:.1e}/{dt:.2f}s")
    report("C4", "DMRG TFI energies vs dense (tol 1e-8, <10 s)", ok, "; ".join(rows))


# --------------------------------------------------------------------------
# 5. linear solvers


def test_c05_linear_solvers():
    n = 8
    A = mpo_weighted_shifts(n, {0: 3.0, 1: -1.0, -1: -1.0}, "open")
    b = random_uniform_mps(n, 2, 4, seed=55)
    nb = np.linalg.norm(dense(b))
    Ad = dense_mpo(A)
    st = Strategy(tolerance=1e-14)
    sols = {
        "cg": cg_solve(A, b, None, st, maxiter=200, tol=1e-11)[0],
        "gmres": gmres_solve(A, b, None, st, maxiter=40, tol=1e-11)[0],
        "dmrg": dmrg_solve(A, b, None, st, maxiter=20, tol=1e-11)[0],
    }
    res = {k: np.linalg.norm(Ad @ dense(x) - dense(b)) / nb for k, x in sols.items()}
    names = list(sols)
    pair = max(np.linalg.norm(dense(sols[p]) - dense(sols[q])) for i, p in enumerate(names) for q in names[i + 1:])
    ok = max(res.values()) <= 1e-8 and pair <= 1e-6
    report("C5", "cg/gmres/dmrg on second difference + I (n=8)", ok,
           ", ".join(f"{k} rel.res {r:.1e}" for k, r in res.items()) + f"; max pairwise distance {pair:.1e}")


# --------------------------------------------------------------------------
# 6. QFT


def test_c06_qft():
    n = 6
    N = 2**n
    v = random_uniform_mps(n, 2, 4, seed=66, complex_values=True)
    dv = dense(v)
    st = Strategy(tolerance=0.0)
    e_dft = np.abs(dense(qft_flip(qft(v, st))) - np.fft.fft(dv) / np.sqrt(N)).max()
    e_inv = np.abs(dense(iqft(qft(v, st), st)) - dv).max()
    e0 = product_state([[1, 0]] * n)
    uni = product_state([[2**-0.5, 2**-0.5]] * n)
    e_e0 = np.abs(dense(qft(e0, st)) - np.full(N, N**-0.5)).max()
    basis0 = np.zeros(N)
    basis0[0] = 1
    e_uni = np.abs(dense(qft_flip(qft(uni, st))) - basis0).max()
    ok = e_dft <= 1e-10 and e_inv <= 1e-12 and e_e0 <= 1e-12 and e_uni <= 1e-12
    report("C6", "QFT vs dense DFT, inverse, e0 and uniform mappings", ok,
           f"DFT {e_dft:.1e}, inverse {e_inv:.1e}, e0 {e_e0:.1e}, uniform {e_uni:.1e}")


# --------------------------------------------------------------------------
# 7. function loading


def test_c07_function_loading():
    rng = np.random.default_rng(77)
    iv = RegularInterval(-1.0, 1.0, 10)
    x = iv.points()
    poly_ok, worst_poly = True, 0.0
    for d in range(0, 9):
        c = rng.normal(size=d + 1)
        m = mps_from_polynomial(c, iv)
        poly_ok &= m.max_bond_dimension() <= d + 1
        worst_poly = max(worst_poly, np.abs(dense(m) - np.polynomial.polynomial.polyval(x, c)).max())
    exp_ok = True
    for t in range(1, 6):
        terms = [(rng.normal(), k) for k in np.linspace(-2, 2, t)]
        exp_ok &= mps_exp_sum(terms, iv).max_bond_dimension() == t
    civ = RegularInterval(-1.0, 1.0, 10, closed=True)
    c = project_coefficients(np.exp, OrthogonalBasis.CHEBYSHEV, 20, (-1.0, 1.0))
    f = expansion_apply(c, OrthogonalBasis.CHEBYSHEV, mps_interval(civ), (-1.0, 1.0), Strategy(tolerance=1e-15))
    e_cheb = np.abs(dense(f) - np.exp(civ.points())).max()
    ok = poly_ok and worst_poly <= 1e-9 and exp_ok and e_cheb <= 1e-12
    report("C7", "polynomial bond <= d+1, EXP_SUM bond = terms, Chebyshev exp", ok,
           f"poly bonds ok={poly_ok} (value err {worst_poly:.1e}), exp-sum ok={exp_ok}, Chebyshev sup err {e_cheb:.1e}")


# --------------------------------------------------------------------------
# 8. tensor cross-interpolation


def test_c08_tci():
    hidden = random_uniform_mps(10, 2, 4, seed=88)
    st, rep = cross_interpolation(BlackBox.from_mps(hidden), "DMRG", Strategy(tolerance=1e-14), max_sweeps=5,
                                  tol=1e-10, seed=1)
    true_err = np.abs(dense(st) - dense(hidden)).max() / np.abs(dense(hidden)).max()
    mesh = Mesh([RegularInterval(-1.0, 1.0, 8), RegularInterval(-1.0, 1.0, 8)], "A")
    bb = BlackBox.from_function(lambda x: np.exp(x[:, 0] + x[:, 1]), mesh)
    st2, rep2 = cross_interpolation(bb, "DMRG", Strategy(tolerance=1e-14), max_sweeps=5, tol=1e-10, seed=2)
    cut = st2.bond_dimensions()[7]
    ok = (rep.validation_error <= 1e-10 and rep.sweeps <= 5 and cut == 1 and rep2.evaluations <= 20000
          and rep2.validation_error <= 1e-10)
    report("C8", "TCI of hidden chi=4 MPS and of exp(x+y)", ok,
           f"hidden: val.err {rep.validation_error:.1e} (true {true_err:.1e}) in {rep.sweeps} sweeps; "
           f"exp(x+y): cut bond {cut}, {rep2.evaluations} evaluations, val.err {rep2.validation_error:.1e}")


# --------------------------------------------------------------------------
# 9. calculus convergence orders


def _order(e1, e2, h1, h2) -> float:
    """Observed order p from two errors; reported as the halving ratio 2**p."""
    return 2 ** (np.log(e1 / e2) / np.log(h1 / h2))


def test_c09_calculus_orders():
    # second-order stencils for the first and second derivative of sin on a periodic grid
    r_fd = []
    for d, ref in ((1, np.cos), (2, lambda x: -np.sin(x))):
        errs, hs = [], []
        for n in (7, 8):
            iv = RegularInterval(0.0, 2 * np.pi, n)
            D = finite_differences_mpo(d, 2, iv, "periodic")
            errs.append(np.abs(dense(apply(D, mps_sin(1.0, iv), NO_TRUNCATION)) - ref(iv.points())).max())
            hs.append(iv.step)
        r_fd.append(_order(*errs, *hs))
    # trapezoid on the integral of sin over [0, pi]
    errs, hs = [], []
    for n in (6, 7):
        iv = RegularInterval(0.0, np.pi, n, closed=True)
        errs.append(abs(integrate_mps(mps_sin(1.0, iv), quadrature_mps("trapezoidal", iv)) - 2.0))
        hs.append(iv.step)
    r_tr = _order(*errs, *hs)
    # Simpson 3/8 needs 2**n - 1 divisible by 3, i.e. even n
    errs, hs = [], []
    for n in (6, 8):
        iv = RegularInterval(0.0, np.pi, n, closed=True)
        errs.append(abs(integrate_mps(mps_sin(1.0, iv), quadrature_mps("simpson38", iv)) - 2.0))
        hs.append(iv.step)
    r_s = _order(*errs, *hs)
    # Fourier derivative of single harmonics
    e_four = 0.0
    for n in range(4, 11):
        iv = RegularInterval(0.0, 2 * np.pi, n)
        for k in sorted({1, 2, 3, 2 ** (n - 2), 2 ** (n - 1) - 1}):
            d = dense(apply(fourier_derivative_mpo(1, iv), mps_sin(float(k), iv), NO_TRUNCATION))
            e_four = max(e_four, np.abs(d - k * np.cos(k * iv.points())).max() / k)
    # Clenshaw-Curtis on exp
    civ = Interval("chebyshev_lobatto", -1.0, 1.0, 5)
    f = mps_from_dense(np.exp(civ.points()))
    e_cc = abs(integrate_mps(f, quadrature_mps("clenshaw_curtis", civ)) - (np.e - 1 / np.e))
    ok = (all(abs(r - 4) <= 0.4 for r in r_fd) and abs(r_tr - 4) <= 0.4 and abs(r_s - 16) <= 2 and e_four <= 1e-8
          and e_cc <= 1e-10)
    report("C9", "FD-2, trapezoid, Simpson 3/8 ratios; Fourier derivative; Clenshaw-Curtis", ok,
           f"FD-2 d/dx {r_fd[0]:.2f}, d2/dx2 {r_fd[1]:.2f}, trapezoid {r_tr:.2f}, Simpson {r_s:.2f}, Fourier rel.err {e_four:.1e}, CC {e_cc:.1e}")


# --------------------------------------------------------------------------
# 10. interpolation


def test_c10_interpolation():
    iv6, iv8 = RegularInterval(0.0, 1.0, 6), RegularInterval(0.0, 1.0, 8)

    def f(x):
        return np.sin(2 * np.pi * x) + 0.3 * np.cos(6 * np.pi * x) + 0.1 * np.sin(22 * np.pi * x)

    v = mps_from_dense(f(iv6.points()))
    e_four = np.abs(dense(fourier_interpolation(v, 2, iv6, Strategy(tolerance=1e-15))) - f(iv8.points())).max()
    e_lin = 0.0
    for a, b in ((0.3, -1.2), (1.0, 2.5)):
        for iv in (RegularInterval(-1.0, 2.0, 5), RegularInterval(0.0, 1.0, 7, closed=True)):
            lin = mps_from_polynomial([a, b], iv)
            fine = dense(fd_interpolation(lin, iv))
            # even outputs copy the samples, odd outputs sit half a step to the right
            ref = np.empty(2 * iv.size)
            ref[0::2] = a + b * iv.points()
            ref[1::2] = a + b * (iv.points() + iv.step / 2)
            e_lin = max(e_lin, np.abs(fine - ref).max())
    ok = e_four <= 1e-9 and e_lin <= 1e-12
    report("C10", "Fourier interpolation n=6->8 of a band-limited signal; FD interpolation of linears", ok,
           f"Fourier {e_four:.1e}, FD linear {e_lin:.1e}")


# --------------------------------------------------------------------------
# 11. time evolution


SZ = MPO([Z.reshape(1, 2, 2, 1).astype(complex)])
PLUS = product_state([[2**-0.5, 2**-0.5]])


def _sigma_z_error(step, dt, T=1.0, **kw):
    spec = EvolutionSpec("real", dt, T, NO_TRUNCATION)
    v = evolve(step, SZ, PLUS, spec, **kw)
    exact = np.array([np.exp(-1j * T), np.exp(1j * T)]) / np.sqrt(2)
    return np.linalg.norm(dense(v) - exact)


def _sz_order(step, dt=0.02, **kw) -> tuple[float, float, float]:
    e1, e2 = _sigma_z_error(step, dt, **kw), _sigma_z_error(step, dt / 2, **kw)
    return float(np.log2(e1 / e2)), e1, e2


EXPLICIT = {
    "euler": (1, lambda H, v, s: explicit_step("euler", H, v, s)),
    "heun": (2, lambda H, v, s: explicit_step("euler2", H, v, s)),
    "rk4": (4, lambda H, v, s: explicit_step("rk4", H, v, s)),
    "cn": (2, crank_nicolson_step),
}


def test_c11_evolution_orders_sigma_z():
    parts, ok = [], True
    for name, (p, step) in EXPLICIT.items():
        q, _, _ = _sz_order(step)
        ok &= abs(q - p) <= 0.2
        parts.append(f"{name} {q:.2f}")
    report("C11a", "Euler/Heun/RK4/CN Richardson orders on sigma_z (+-0.2)", ok, ", ".join(parts))


# Errors below this floor are round-off; no order can be read from them.
ORDER_FLOOR = 1e-13


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="on a single site TDVP reduces to the exact exponential; no step error to measure")
def test_c11_tdvp_order_sigma_z():
    q, e1, e2 = _sz_order(tdvp_step)
    ok = min(e1, e2) > ORDER_FLOOR and abs(q - 2) <= 0.2
    report("C11b", "TDVP Richardson order 2 on sigma_z", ok,
           f"errors {e1:.1e}, {e2:.1e} (round-off floor {ORDER_FLOOR:.0e}); estimate {q:.2f}")


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="a single qubit has no bonds; the one splittable form is a single exact gate")
def test_c11_trotter2_order_sigma_z():
    # sigma_z on each site of a two-site chain: one bond term, one exact gate
    ham = NNHamiltonian([2, 2], [np.kron(Z, np.eye(2)) + np.kron(np.eye(2), Z)])
    H = graph_to_mpo(ham.graph())
    v0 = product_state([[2**-0.5, 2**-0.5]] * 2)
    exact = np.kron(*[np.array([np.exp(-1j), np.exp(1j)]) / np.sqrt(2)] * 2)
    errs = []
    for dt in (0.02, 0.01):
        v = evolve(lambda Hm, v, s: trotter_step(ham, v, s, 2), H, v0, EvolutionSpec("real", dt, 1.0, NO_TRUNCATION))
        errs.append(np.linalg.norm(dense(v) - exact))
    q = float(np.log2(errs[0] / errs[1]))
    ok = min(errs) > ORDER_FLOOR and abs(q - 2) <= 0.2
    report("C11c", "Trotter2 Richardson order 2 on sigma_z", ok,
           f"errors {errs[0]:.1e}, {errs[1]:.1e} (round-off floor {ORDER_FLOOR:.0e}); estimate {q:.2f}")


def test_c11_trotter2_order_tfi():
    N, g = 6, 1.0
    ham = tfi_nn(N, g)
    H = tfi_mpo(N, g)
    v0 = product_state([[1, 0]] * N)
    T = 0.5
    exact = np.linalg.eigh(tfi_dense(N, g))
    psi = exact[1] @ (np.exp(-1j * exact[0] * T) * (exact[1].conj().T @ dense(v0)))
    errs = []
    for dt in (0.05, 0.025):
        v = evolve(lambda Hm, v, s: trotter_step(ham, v, s, 2), H, v0, EvolutionSpec("real", dt, T, NO_TRUNCATION))
        errs.append(np.linalg.norm(dense(v) - psi))
    q = float(np.log2(errs[0] / errs[1]))
    report("C11d", "Trotter2 Richardson order on the TFI chain N=6 (+-0.2)", abs(q - 2) <= 0.2,
           f"errors {errs[0]:.1e}, {errs[1]:.1e}; order {q:.2f}")


def test_c11_norm_drift_and_tdvp_quench():
    drift_cn = 0.0
    spec = EvolutionSpec("real", 0.01, 1.0, NO_TRUNCATION)
    v = PLUS
    for _ in range(spec.steps):
        v = crank_nicolson_step(SZ, v, spec)
        drift_cn = max(drift_cn, abs(np.linalg.norm(dense(v)) - 1))
    N, g = 6, 1.0
    H = tfi_mpo(N, g)
    Hd = tfi_dense(N, g)
    w, U = np.linalg.eigh(Hd)
    spec = EvolutionSpec("real", 0.02, 1.0, Strategy(tolerance=1e-12, max_bond=16))
    v = product_state([[1, 0]] * N)
    psi0 = dense(v)
    drift_tdvp, prev = 0.0, 1.0
    for _ in range(spec.steps):
        v = tdvp_step(H, v, spec)
        nv = np.linalg.norm(dense(v))
        drift_tdvp = max(drift_tdvp, abs(nv - prev))
        prev = nv
    psi = U @ (np.exp(-1j * w * 1.0) * (U.conj().T @ psi0))
    dv = dense(v) / np.linalg.norm(dense(v))
    e_obs = max(abs(np.vdot(dv, embed(N, {i: Z}) @ dv) - np.vdot(psi, embed(N, {i: Z}) @ psi)) for i in range(N))
    ok = drift_cn <= 1e-8 and drift_tdvp <= 1e-8 and e_obs <= 1e-4
    report("C11e", "CN/TDVP norm drift per step; TDVP TFI quench vs dense (chi=16)", ok,
           f"CN drift {drift_cn:.1e}, TDVP drift {drift_tdvp:.1e}, max |<Z_i>| error {e_obs:.1e}")


# --------------------------------------------------------------------------
# 12. Hamiltonian builder


def test_c12_graph_to_mpo_dense_and_hermitian():
    rng = np.random.default_rng(1212)
    ops = {"X": X, "Z": Z, "Y": np.array([[0, -1j], [1j, 0]])}
    worst, herm = 0.0, 0.0
    for _ in range(20):
        N = int(rng.integers(2, 7))
        g = InteractionGraph([2] * N)
        ref = np.zeros((2**N, 2**N), dtype=complex)
        for i in range(N):
            name = str(rng.choice(list(ops)))
            h = rng.normal()
            g.add_local(i, ops[name], h)
            ref += h * embed(N, {i: ops[name]})
        for _ in range(int(rng.integers(1, 2 * N))):
            i, j = sorted(rng.choice(N, 2, replace=False))
            a, b = str(rng.choice(list(ops))), str(rng.choice(list(ops)))
            J = rng.normal()
            g.add_pair(int(i), int(j), ops[a], ops[b], J)
            ref += J * embed(N, {int(i): ops[a], int(j): ops[b]})
        M = dense_mpo(graph_to_mpo(g))
        worst = max(worst, np.abs(M - ref).max())
        herm = max(herm, np.linalg.norm(M - M.conj().T) / np.linalg.norm(M))
    ok = worst <= 1e-10 and herm <= 1e-12
    report("C12a", "graph_to_mpo equals Kronecker embedding; hermitian output", ok,
           f"max deviation {worst:.1e}, relative hermiticity defect {herm:.1e}")


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="sum of ZZ bonds has operator Schmidt rank 3 across interior cuts")
def test_c12_zz_chain_bond_two():
    N = 8
    g = InteractionGraph([2] * N)
    g.add_couplings(np.eye(N, k=1), Z, Z)
    bonds = graph_to_mpo(g).bond_dimensions()
    report("C12b", "nearest-neighbour ZZ chain simplifies to bond dimension 2", max(bonds) <= 2,
           f"bond dimensions {bonds}")


# --------------------------------------------------------------------------
# 13. command line


def test_c13_cli(tmp_path, capsys):
    codes, bad_schema = {}, []
    for task in cli.TASKS:
        out = tmp_path / task
        code = cli.main([task, "--out", str(out)])
        codes[task] = code
        doc = json.loads((out / "result.json").read_text()) if code == 0 else None
        if doc is not None:
            try:
                jsonschema.validate(doc, RESULT_SCHEMA)
            except jsonschema.ValidationError as exc:
                bad_schema.append(f"{task}: {exc.message}")
    capsys.readouterr()
    rows = list(csv.reader(io.StringIO((tmp_path / "bench" / "bench.csv").read_text())))
    csv_ok = rows[0] == list(cli_columns()) and len(rows) > 1 and all(len(r) == len(rows[0]) for r in rows)
    v = random_uniform_mps(7, 2, 5, seed=13, complex_values=True) * (1 / 3)
    v = v.with_error(1.234567890123e-9)
    back = ttio.loads(ttio.dumps(v))
    W = random_mpo(5, 3, np.random.default_rng(0))
    backW = ttio.loads(ttio.dumps(W))
    bits_ok = (
        all(a.tobytes() == b.tobytes() for a, b in zip(v.tensors, back.tensors))
        and back.error == v.error
        and all(a.tobytes() == b.tobytes() for a, b in zip(W.tensors, backW.tensors))
        and ttio.dumps(back) == ttio.dumps(v)
    )
    ok = all(c == 0 for c in codes.values()) and not bad_schema and csv_ok and bits_ok
    report("C13", "CLI tasks on bundled configs, bench CSV, bit-exact serialization", ok,
           f"exit codes {sorted(set(codes.values()))}, schema errors {bad_schema or 'none'}, "
           f"csv ok={csv_ok}, round-trip ok={bits_ok}")


def cli_columns():
    from ttlab.bench import CSV_COLUMNS

    return CSV_COLUMNS
