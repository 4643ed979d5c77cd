"""Linear-system solvers on MPS: CG, BiCGSTAB, restarted GMRES and DMRG."""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from ..blas import TwoSiteLinearForm, TwoSiteQuadraticForm, apply, combine, scprod
from ..core import (
    DEFAULT_STRATEGY,
    NO_TRUNCATION,
    CanonicalMPS,
    MPO,
    MPS,
    NumericalError,
    Strategy,
    canonicalize,
    schmidt_split,
)
from .report import SolveReport, residual_norm

CGS = "CGS"
BICGSTAB = "BICGSTAB"

DENSE_LOCAL_LIMIT = 4096


def _norm(v: MPS) -> float:
    return v.norm() if isinstance(v, CanonicalMPS) else canonicalize(v, 0, NO_TRUNCATION).norm()


def _residual(A, x, b, strategy):
    """r = b - A x, recomputed from scratch for stability."""
    if x is None:
        return canonicalize(b, 0, NO_TRUNCATION)
    return combine([1.0, -1.0], [b, apply(A, x, strategy)], strategy)


def cg_solve(
    A,
    b: MPS,
    guess: MPS | None = None,
    strategy: Strategy = DEFAULT_STRATEGY,
    maxiter: int = 100,
    tol: float = 1e-10,
    variant: str = CGS,
):
    """Solve ``A x = b`` by conjugate gradients (CGS) or BiCGSTAB.

    CGS requires ``A`` hermitian positive definite. Stops once
    ``||b - A x|| < tol * ||b||``. Returns ``(x, residual, report)``.
    """
    if variant == BICGSTAB:
        return _bicgstab(A, b, guess, strategy, maxiter, tol)
    if variant != CGS:
        raise ValueError(f"unknown variant {variant!r}")
    report = SolveReport()
    nb = _norm(b)
    x = None if guess is None else guess
    r = _residual(A, x, b, strategy)
    report.matvecs += x is not None
    res = r.norm()
    report.trace.append((0, res))
    if res < tol * nb:
        report.converged = True
        x = r * 0.0 if x is None else x
        report.residual = res
        return x, res, report
    p = r
    rho = res * res
    for it in range(1, maxiter + 1):
        Ap = apply(A, p, strategy)
        report.matvecs += 1
        curv = scprod(p, Ap).real
        if curv <= 1e-14 * rho:
            raise NumericalError(f"vanishing curvature p^H A p = {curv:.3e}")
        alpha = rho / curv
        x = p * alpha if x is None else combine([1.0, alpha], [x, p], strategy)
        r = _residual(A, x, b, strategy)
        report.matvecs += 1
        res = r.norm()
        report.trace.append((it, res))
        report.iterations = it
        if res < tol * nb:
            report.converged = True
            break
        rho_new = res * res
        p = combine([1.0, rho_new / rho], [r, p], strategy)
        rho = rho_new
    x = canonicalize(x, 0, NO_TRUNCATION) if not isinstance(x, CanonicalMPS) else x
    res = residual_norm(A, x, b)
    report.residual = res
    return x, res, report


def _bicgstab(A, b, guess, strategy, maxiter, tol):
    report = SolveReport()
    nb = _norm(b)
    x = guess
    r = _residual(A, x, b, strategy)
    report.matvecs += x is not None
    rhat = r
    res = r.norm()
    report.trace.append((0, res))
    if res < tol * nb:
        report.converged = True
        x = r * 0.0 if x is None else x
        report.residual = res
        return x, res, report
    rho = alpha = omega = 1.0
    p = v = None
    for it in range(1, maxiter + 1):
        rho_new = scprod(rhat, r)
        if abs(rho_new) <= 1e-300:
            raise NumericalError("BiCGSTAB breakdown: <rhat, r> = 0")
        if p is None:
            p = r
        else:
            beta = (rho_new / rho) * (alpha / omega)
            p = combine([1.0, beta, -beta * omega], [r, p, v], strategy)
        rho = rho_new
        v = apply(A, p, strategy)
        report.matvecs += 1
        denom = scprod(rhat, v)
        if abs(denom) <= 1e-300:
            raise NumericalError("BiCGSTAB breakdown: <rhat, A p> = 0")
        alpha = rho / denom
        s = combine([1.0, -alpha], [r, v], strategy)
        if s.norm() < tol * nb:
            x = p * alpha if x is None else combine([1.0, alpha], [x, p], strategy)
            r = _residual(A, x, b, strategy)
            res = r.norm()
            report.trace.append((it, res))
            report.iterations = it
            if res < tol * nb:
                report.converged = True
                break
            continue
        t = apply(A, s, strategy)
        report.matvecs += 1
        tt = scprod(t, t).real
        omega = scprod(t, s) / tt if tt > 0 else 0.0
        if x is None:
            x = combine([alpha, omega], [p, s], strategy)
        else:
            x = combine([1.0, alpha, omega], [x, p, s], strategy)
        r = _residual(A, x, b, strategy)
        report.matvecs += 1
        res = r.norm()
        report.trace.append((it, res))
        report.iterations = it
        if res < tol * nb:
            report.converged = True
            break
        if omega == 0:
            raise NumericalError("BiCGSTAB breakdown: omega = 0")
    res = residual_norm(A, x, b)
    report.residual = res
    return x, res, report


def gmres_solve(
    A,
    b: MPS,
    guess: MPS | None = None,
    strategy: Strategy = DEFAULT_STRATEGY,
    maxiter: int = 20,
    restart_m: int = 10,
    tol: float = 1e-10,
):
    """Restarted GMRES with modified Gram-Schmidt on MPS vectors.

    ``maxiter`` bounds the number of restart cycles.  A second
    orthogonalization pass runs when the new vector keeps an overlap above
    ``1e-8`` with the basis.
    """
    report = SolveReport()
    nb = _norm(b)
    x = guess
    for cycle in range(maxiter):
        r = _residual(A, x, b, strategy)
        report.matvecs += x is not None
        beta = r.norm()
        report.trace.append((report.matvecs, beta))
        if beta < tol * nb:
            report.converged = True
            break
        V = [r * (1.0 / beta)]
        Hm = np.zeros((restart_m + 1, restart_m), dtype=np.complex128)
        y = None
        m_used = 0
        for j in range(restart_m):
            w = apply(A, V[j], strategy)
            report.matvecs += 1
            for _ in range(2):
                h = np.zeros(j + 1, dtype=np.complex128)
                for i in range(j + 1):
                    h[i] = scprod(V[i], w)
                    w = combine([1.0, -h[i]], [w, V[i]], strategy)
                Hm[: j + 1, j] += h
                nw = w.norm()
                loss = max(abs(scprod(V[i], w)) for i in range(j + 1)) / max(nw, 1e-300)
                if loss <= 1e-8:
                    break
            Hm[j + 1, j] = nw
            m_used = j + 1
            e1 = np.zeros(j + 2, dtype=np.complex128)
            e1[0] = beta
            y, *_ = scipy.linalg.lstsq(Hm[: j + 2, : j + 1], e1)
            est = np.linalg.norm(Hm[: j + 2, : j + 1] @ y - e1)
            report.trace.append((report.matvecs, float(est)))
            if nw <= 1e-14 * beta or est < tol * nb:
                # happy breakdown or converged within this cycle
                break
            V.append(w * (1.0 / nw))
        coeffs = list(y[:m_used])
        terms = V[:m_used]
        x = combine(coeffs if x is None else [1.0] + coeffs, terms if x is None else [x] + terms, strategy)
        report.iterations = cycle + 1
    else:
        r = _residual(A, x, b, strategy)
        report.converged = r.norm() < tol * nb
    if x is None:
        x = canonicalize(b, 0, NO_TRUNCATION) * 0.0
    res = residual_norm(A, x, b)
    report.converged = report.converged or res < tol * nb
    report.residual = res
    return x, res, report


def dmrg_solve(
    A: MPO,
    b: MPS,
    guess: MPS | None = None,
    strategy: Strategy = DEFAULT_STRATEGY,
    maxiter: int = 20,
    tol: float = 1e-10,
):
    """Solve ``A x = b`` by sweeping local projected systems on site pairs.

    Each step solves ``G_n y = f_n`` where ``G_n`` is the two-site projection
    of ``A`` and ``f_n`` that of ``b``. Returns ``(x, residual, report)``
    with the absolute residual ``||A x - b||``.
    """
    report = SolveReport()
    nb = _norm(b)
    x = canonicalize(b if guess is None else guess, 0, NO_TRUNCATION)
    L = len(x)
    if L == 1:
        from ..core import mpo_to_dense

        y = np.linalg.solve(mpo_to_dense(A), b[0].reshape(-1))
        x = CanonicalMPS([y.reshape(1, -1, 1)], 0)
        res = residual_norm(A, x, b)
        report.residual, report.converged = res, res < tol * nb
        return x, res, report
    Q = TwoSiteQuadraticForm(x, A, None, 0)
    F = TwoSiteLinearForm(x, b, 0)
    res = float("inf")
    for sweep in range(maxiter):
        for direction in ("right", "left"):
            sites = range(L - 1) if direction == "right" else range(L - 2, -1, -1)
            for n in sites:
                Q.site = F.site = n
                f = F.f
                shape = f.shape
                if f.size <= DENSE_LOCAL_LIMIT:
                    y = scipy.linalg.solve(Q.matrix(), f.reshape(-1))
                else:
                    op = scipy.sparse.linalg.LinearOperator(
                        (f.size, f.size), matvec=lambda z: Q.apply(z).reshape(-1), dtype=np.complex128
                    )
                    y, _ = scipy.sparse.linalg.gmres(op, f.reshape(-1), x0=Q.b.reshape(-1), rtol=1e-14)
                report.matvecs += 1
                a, d1, d2, bb = shape
                U, V, _ = schmidt_split(y.reshape(a * d1, d2 * bb), strategy, direction)
                U = U.reshape(a, d1, -1)
                V = V.reshape(-1, d2, bb)
                if direction == "right":
                    Q.update_right(U, V)
                    F.update_right(U, V)
                else:
                    Q.update_left(U, V)
                    F.update_left(U, V)
        x = CanonicalMPS(Q.bra, 0)
        res = residual_norm(A, x, b)
        report.iterations = sweep + 1
        report.trace.append((sweep + 1, res))
        if res < tol * nb:
            report.converged = True
            break
    report.residual = res
    return x, res, report
