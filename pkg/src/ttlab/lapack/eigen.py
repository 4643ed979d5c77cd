"""Ground-state searches: two-site DMRG, gradient descent, power and Arnoldi."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from ..blas import TwoSiteQuadraticForm, apply, combine, expectation_mpo, scprod
from ..core import (
    DEFAULT_STRATEGY,
    NO_TRUNCATION,
    CanonicalMPS,
    MPO,
    MPS,
    Strategy,
    canonicalize,
    mpo_to_dense,
    schmidt_split,
)
from .report import SolveReport, check_hermitian_energy

DENSE_LOCAL_LIMIT = 4096
LANCZOS_NCV = 20


def _normalized(v: MPS) -> CanonicalMPS:
    c = v if isinstance(v, CanonicalMPS) else canonicalize(v, 0, NO_TRUNCATION)
    n = c.norm()
    if n == 0:
        raise ValueError("guess has zero norm")
    return c * (1.0 / n)


def _rayleigh(H, v: MPS) -> complex:
    return expectation_mpo(H, v) / scprod(v, v)


def _local_ground(form: TwoSiteQuadraticForm, x0: np.ndarray) -> tuple[float, np.ndarray]:
    dim = x0.size
    if dim <= DENSE_LOCAL_LIMIT:
        G = form.matrix()
        G = 0.5 * (G + G.conj().T)
        w, U = scipy.linalg.eigh(G, subset_by_index=[0, 0])
        return float(w[0]), U[:, 0]
    op = scipy.sparse.linalg.LinearOperator(
        (dim, dim), matvec=lambda x: form.apply(x).reshape(-1), dtype=np.complex128
    )
    w, U = scipy.sparse.linalg.eigsh(op, k=1, which="SA", v0=x0.reshape(-1), ncv=min(LANCZOS_NCV, dim - 1))
    return float(w[0]), U[:, 0]


def dmrg_min_eigen(
    H: MPO,
    guess: MPS,
    strategy: Strategy = DEFAULT_STRATEGY,
    maxiter: int = 20,
    tol: float = 1e-12,
):
    """Smallest eigenvalue of a hermitian MPO by two-site DMRG sweeps.

    Returns ``(E, state, report)`` with ``E`` the Rayleigh quotient of the
    final canonical state.
    """
    report = SolveReport()
    v = _normalized(guess)
    L = len(v)
    if L == 1:
        M = mpo_to_dense(H)
        w, U = scipy.linalg.eigh(0.5 * (M + M.conj().T))
        out = CanonicalMPS([U[:, 0].reshape(1, -1, 1)], 0)
        report.value, report.converged, report.iterations = float(w[0]), True, 1
        return float(w[0]), out, report
    form = TwoSiteQuadraticForm(v, H, None, 0)
    E_last = None
    E = float("nan")
    for sweep in range(maxiter):
        for direction in ("right", "left"):
            sites = range(L - 1) if direction == "right" else range(L - 2, -1, -1)
            for n in sites:
                form.site = n
                x0 = form.b
                E, x = _local_ground(form, x0)
                report.matvecs += 1
                a, d1, d2, b = x0.shape
                A, B, _ = schmidt_split(x.reshape(a * d1, d2 * b), strategy, direction)
                A = A.reshape(a, d1, -1)
                B = B.reshape(-1, d2, b)
                if direction == "right":
                    form.update_right(A, B)
                else:
                    form.update_left(A, B)
        report.iterations = sweep + 1
        report.trace.append((sweep + 1, E))
        if E_last is not None and abs(E - E_last) <= tol * max(abs(E), 1.0):
            report.converged = True
            break
        E_last = E
    state = CanonicalMPS(form.bra, 0)
    state = state * (1.0 / state.norm())
    E_final = check_hermitian_energy(_rayleigh(H, state), report)
    report.value = E_final
    return E_final, state, report


def gradient_descent(
    H: MPO,
    guess: MPS,
    strategy: Strategy = DEFAULT_STRATEGY,
    maxiter: int = 100,
    tol: float = 1e-12,
):
    """Steepest descent on the Rayleigh quotient with an exact line search.

    With ``H' = H - <H>``, ``a = <H'^2>`` and ``b = <H'^3>``, the step along
    ``g = H' v`` that minimizes the quotient is
    ``(b - sqrt(b^2 + 4 a^3)) / (2 a^2)``.
    """
    report = SolveReport()
    v = _normalized(guess)
    E_last = None
    E = float("nan")
    for it in range(maxiter):
        Hv = apply(H, v, strategy)
        E = check_hermitian_energy(scprod(v, Hv), report)
        g = combine([1.0, -E], [Hv, v], strategy)
        Hg = apply(H, g, strategy)
        report.matvecs += 2
        a = float(scprod(g, g).real)
        b = float(scprod(g, Hg).real) - E * a
        report.iterations = it + 1
        report.trace.append((it, E))
        if a <= tol * max(abs(E), 1.0) ** 2:
            report.converged = True
            break
        if E_last is not None and abs(E - E_last) <= tol * max(abs(E), 1.0):
            report.converged = True
            break
        E_last = E
        step = (b - math.sqrt(b * b + 4 * a**3)) / (2 * a * a)
        v = _normalized(combine([1.0, step], [v, g], strategy))
    E = check_hermitian_energy(_rayleigh(H, v), report)
    report.value = E
    return E, v, report


def _power_update(H, v, strategy, inverse, shift, report, solver_tol):
    if inverse:
        from .solve import gmres_solve

        op = H
        if shift:
            from ..core import MPOSum, mpo_identity

            dims = H.dimensions()[0]
            op = MPOSum([1.0, -shift], [H, mpo_identity(len(dims), dims)])
        # the shifted operator is indefinite in general, so CG is not safe here
        w, _, rep = gmres_solve(op, v, None, strategy, maxiter=50, tol=solver_tol)
        report.matvecs += rep.matvecs
    else:
        w = apply(H, v, strategy)
        report.matvecs += 1
    return _normalized(w)


def power_method(
    H: MPO,
    guess: MPS,
    strategy: Strategy = DEFAULT_STRATEGY,
    maxiter: int = 100,
    tol: float = 1e-12,
    inverse: bool = False,
    shift: float = 0.0,
    solver_tol: float = 1e-12,
):
    """Power iteration ``v <- H v / ||H v||`` (or inverse iteration).

    The eigenvalue estimate is the Rayleigh quotient of the current vector.
    """
    report = SolveReport()
    v = _normalized(guess)
    lam_last = None
    lam = float("nan")
    for it in range(maxiter):
        v = _power_update(H, v, strategy, inverse, shift, report, solver_tol)
        lam = check_hermitian_energy(_rayleigh(H, v), report)
        report.iterations = it + 1
        report.trace.append((it + 1, lam))
        if lam_last is not None and abs(lam - lam_last) <= tol * max(abs(lam), 1.0):
            report.converged = True
            break
        lam_last = lam
    report.value = lam
    return lam, v, report


@dataclass
class KrylovBasis:
    """Non-orthogonal Krylov vectors with projected operator ``A`` and overlap ``N``."""

    vectors: list = field(default_factory=list)
    images: list = field(default_factory=list)
    A: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.complex128))
    N: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.complex128))

    def add(self, v: MPS, Hv: MPS) -> None:
        m = len(self.vectors)
        A = np.zeros((m + 1, m + 1), dtype=np.complex128)
        N = np.zeros((m + 1, m + 1), dtype=np.complex128)
        A[:m, :m], N[:m, :m] = self.A, self.N
        for i, (u, Hu) in enumerate(zip(self.vectors, self.images)):
            A[i, m] = scprod(u, Hv)
            A[m, i] = np.conj(A[i, m])
            N[i, m] = scprod(u, v)
            N[m, i] = np.conj(N[i, m])
        A[m, m] = scprod(v, Hv).real
        N[m, m] = scprod(v, v).real
        self.vectors.append(v)
        self.images.append(Hv)
        self.A, self.N = A, N

    def lowest(self, cutoff: float = 1e-12) -> tuple[float, np.ndarray, float]:
        """Smallest generalized eigenpair of ``A c = lambda N c``.

        Directions with N-eigenvalues below ``cutoff * max`` are discarded.
        Returns ``(lambda, c, condition_number)``.
        """
        s, U = scipy.linalg.eigh(0.5 * (self.N + self.N.conj().T))
        keep = s > cutoff * s.max()
        cond = s.max() / max(s.min(), 1e-300)
        B = U[:, keep] / np.sqrt(s[keep])
        Ar = B.conj().T @ self.A @ B
        w, Y = scipy.linalg.eigh(0.5 * (Ar + Ar.conj().T))
        return float(w[0]), B @ Y[:, 0], float(cond)


def arnoldi_eigh(
    H: MPO,
    guess: MPS,
    window: int = 6,
    maxiter: int = 100,
    tol: float = 1e-12,
    strategy: Strategy = DEFAULT_STRATEGY,
):
    """Restarted Krylov search for the smallest eigenvalue.

    With ``window == 1`` each restart reduces to a power-method update.
    ``maxiter`` counts operator applications.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if window == 1:
        lam, v, report = power_method(H, guess, strategy, maxiter, tol)
        return lam, v, report
    report = SolveReport()
    v = _normalized(guess)
    basis = KrylovBasis()
    Hv = apply(H, v, strategy)
    report.matvecs += 1
    basis.add(v, Hv)
    lam_last = None
    lam = float(basis.A[0, 0].real)
    while report.matvecs < maxiter:
        lam, c, cond = basis.lowest()
        report.trace.append((report.matvecs, lam))
        report.iterations = report.matvecs
        if lam_last is not None and abs(lam - lam_last) <= tol * max(abs(lam), 1.0):
            report.converged = True
            break
        lam_last = lam
        m = len(basis.vectors)
        if m >= window or cond > 1e12:
            v = _normalized(combine(list(c), basis.vectors, strategy))
            basis = KrylovBasis()
            Hv = apply(H, v, strategy)
            report.matvecs += 1
            basis.add(v, Hv)
            # a one-vector basis repeats the previous estimate
            lam_last = None
            continue
        # next direction: last image orthogonalized against the basis
        last = basis.images[-1]
        proj = np.array([scprod(u, last) for u in basis.vectors])
        coef = scipy.linalg.lstsq(basis.N, proj)[0]
        w = combine([1.0] + list(-coef), [last] + basis.vectors, strategy)
        nw = w.norm()
        if nw <= 1e-14 * max(abs(lam), 1.0):
            # breakdown: the basis spans an invariant subspace
            v = _normalized(combine(list(c), basis.vectors, strategy))
            basis = KrylovBasis()
            Hv = apply(H, v, strategy)
            report.matvecs += 1
            basis.add(v, Hv)
            # a one-vector basis repeats the previous estimate
            lam_last = None
            continue
        w = w * (1.0 / nw)
        Hw = apply(H, w, strategy)
        report.matvecs += 1
        basis.add(w, Hw)
    lam, c, _ = basis.lowest()
    v = _normalized(combine(list(c), basis.vectors, strategy))
    lam = check_hermitian_energy(_rayleigh(H, v), report)
    report.value = lam
    return lam, v, report
