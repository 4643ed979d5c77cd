"""Symmetric two-site TDVP integrator."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ..blas import TwoSiteQuadraticForm
from ..core import MPO, NO_TRUNCATION, CanonicalMPS, MPS, canonicalize, mpo_to_dense, schmidt_split
from .spec import EvolutionSpec, finish_step

DENSE_LOCAL_LIMIT = 4096
KRYLOV_DIM = 20
KRYLOV_TOL = 1e-12


def _expm_hermitian(G: np.ndarray, x: np.ndarray, c: complex) -> np.ndarray:
    """``exp(c G) x`` for hermitian ``G``."""
    w, U = scipy.linalg.eigh(0.5 * (G + G.conj().T))
    return U @ (np.exp(c * w) * (U.conj().T @ x))


def krylov_expm(matvec, x: np.ndarray, c: complex, dim: int = KRYLOV_DIM, tol: float = KRYLOV_TOL) -> np.ndarray:
    """``exp(c G) x`` for hermitian ``G`` by Lanczos with full reorthogonalization."""
    beta0 = np.linalg.norm(x)
    if beta0 == 0:
        return x.copy()
    V = [x / beta0]
    alpha, beta = [], []
    y = x
    for k in range(dim):
        w = matvec(V[k])
        a = np.vdot(V[k], w).real
        alpha.append(a)
        for q in V:
            w = w - np.vdot(q, w) * q
        b = np.linalg.norm(w)
        T = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
        e = _expm_hermitian(T, np.eye(len(alpha))[:, 0], c)
        y = beta0 * np.stack(V, axis=1) @ e
        # the last coefficient bounds the neglected part of the Krylov series
        if b < tol * abs(a) + 1e-300 or abs(beta0 * b * e[-1]) < tol * beta0:
            break
        beta.append(b)
        V.append(w / b)
    return y


def _one_site_apply(Lenv, W, R, x):
    """y[a,j,e] = sum L[a,w,b] W[w,j,i,g] R[e,g,d] x[b,i,d]."""
    T = np.tensordot(Lenv, x, axes=(2, 0))  # a w i d
    T = np.tensordot(T, W, axes=([1, 2], [0, 2]))  # a d j g
    return np.tensordot(T, R, axes=([1, 3], [2, 1]))  # a j e


def _one_site_matrix(Lenv, W, R):
    G = np.einsum("awb,wjig,egd->ajebid", Lenv, W, R, optimize=True)
    n = Lenv.shape[0] * W.shape[1] * R.shape[0]
    return G.reshape(n, n)


def _evolve_local(matrix, matvec, x: np.ndarray, c: complex) -> np.ndarray:
    shape = x.shape
    v = x.reshape(-1)
    if v.size <= DENSE_LOCAL_LIMIT:
        return _expm_hermitian(matrix(), v, c).reshape(shape)
    return krylov_expm(lambda y: matvec(y.reshape(shape)).reshape(-1), v, c).reshape(shape)


def tdvp_step(H: MPO, v: MPS, spec: EvolutionSpec) -> CanonicalMPS:
    """One symmetric second-order two-site TDVP step of size ``spec.dt``.

    Left-to-right: each pair is evolved forward by ``dt/2``, split by SVD
    under ``spec.strategy`` and the right factor is evolved back by ``dt/2``.
    The right-to-left sweep mirrors it.  The input is canonicalized first.
    """
    c = -spec.factor * spec.dt / 2
    state = canonicalize(v, 0, NO_TRUNCATION) if not (isinstance(v, CanonicalMPS) and v.center == 0) else v
    L = len(state)
    if L == 1:
        M = mpo_to_dense(H)
        x = _expm_hermitian(M, state[0].reshape(-1), 2 * c)
        out = CanonicalMPS([x.reshape(state[0].shape)], 0, state.error)
        return finish_step(out, spec)
    form = TwoSiteQuadraticForm(CanonicalMPS(state.tensors, 0), H, None, 0)
    err = 0.0
    for direction in ("right", "left"):
        sites = range(L - 1) if direction == "right" else range(L - 2, -1, -1)
        for n in sites:
            form.site = n
            theta = form.b
            theta = _evolve_local(form.matrix, form.apply, theta, c)
            a, d1, d2, b = theta.shape
            A, B, e = schmidt_split(theta.reshape(a * d1, d2 * b), spec.strategy, direction)
            err += e
            A = A.reshape(a, d1, -1)
            B = B.reshape(-1, d2, b)
            if direction == "right":
                form.update_right(A, B)
                if n < L - 2:
                    m = n + 1
                    Lenv, W, R = form.left[m], form.op[m], form.right[m + 1]
                    form.bra[m] = _evolve_local(
                        lambda: _one_site_matrix(Lenv, W, R),
                        lambda x: _one_site_apply(Lenv, W, R, x),
                        form.bra[m], -c,
                    )
            else:
                form.update_left(A, B)
                if n > 0:
                    Lenv, W, R = form.left[n], form.op[n], form.right[n + 1]
                    form.bra[n] = _evolve_local(
                        lambda: _one_site_matrix(Lenv, W, R),
                        lambda x: _one_site_apply(Lenv, W, R, x),
                        form.bra[n], -c,
                    )
    out = CanonicalMPS(form.bra, 0, state.error + err)
    return finish_step(out, spec)
