"""Finite-precision BLAS on MPS and MPO.

Every approximate operation returns a :class:`CanonicalMPS` whose ``error``
field adds the new truncation distance to the propagated input errors.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import kernels
from .core import (
    DEFAULT_STRATEGY,
    NO_TRUNCATION,
    CanonicalMPS,
    Method,
    MPO,
    MPOList,
    MPOSum,
    MPS,
    MPSSum,
    ShapeError,
    Strategy,
    canonicalize,
    join_mps,
    mpo_as_mps,
    mps_as_mpo,
    schmidt_split,
    zero_mps,
)

# relative size below which a simplification target is treated as zero
ZERO_THRESHOLD = 1e-14


def _terms(target) -> tuple[list[complex], list[MPS]]:
    if isinstance(target, MPSSum):
        return list(target.weights), list(target.states)
    if isinstance(target, MPS):
        return [1.0 + 0j], [target]
    raise TypeError(f"expected MPS or MPSSum, got {type(target).__name__}")


def _exact_norm(weights, states) -> float:
    """Norm of a weighted sum via QR canonicalization (no squared cancellation)."""
    joined = join_mps(weights, [s.with_error(0.0) for s in states])
    return canonicalize(joined, 0, NO_TRUNCATION).norm()


def distance(a, b) -> float:
    """L2 distance ``||a - b||`` computed from the joined difference."""
    wa, sa = _terms(a)
    wb, sb = _terms(b)
    return _exact_norm(wa + [-w for w in wb], sa + sb)


# --------------------------------------------------------------------------
# simplification


def _two_site_projection(L, A, B, R):
    """f[a, s, t, e] = sum L[a, x] A[x, s, y] B[y, t, z] R[e, z]."""
    T = np.tensordot(L, A, axes=(1, 0))
    T = np.tensordot(T, B, axes=(2, 0))
    return np.tensordot(T, R, axes=(3, 1))


def _variational(weights, states, guess: CanonicalMPS, strategy: Strategy, norm_phi2: float):
    L = len(guess)
    psi = guess.tensors
    if guess.center != 0:
        psi = canonicalize(guess, 0, NO_TRUNCATION).tensors
    K = len(states)
    one = np.ones((1, 1), dtype=np.complex128)
    # right environments R[k][n] summarize sites n.. of <psi|phi_k>
    right = [[None] * (L + 1) for _ in range(K)]
    left = [[None] * (L + 1) for _ in range(K)]
    for k, phi in enumerate(states):
        right[k][L] = one
        for n in range(L - 1, 0, -1):
            right[k][n] = kernels.env_right(right[k][n + 1], psi[n], phi[n])
        left[k][0] = one
    tol = strategy.simplification_tolerance
    last = None
    res2 = norm_phi2
    for _ in range(strategy.max_sweeps):
        for direction in ("right", "left"):
            sites = range(L - 1) if direction == "right" else range(L - 2, -1, -1)
            for n in sites:
                f = 0
                for k, (w, phi) in enumerate(zip(weights, states)):
                    f = f + w * _two_site_projection(left[k][n], phi[n], phi[n + 1], right[k][n + 2])
                a, d1, d2, b = f.shape
                A, B, err = schmidt_split(f.reshape(a * d1, d2 * b), strategy, direction)
                psi[n] = A.reshape(a, d1, -1)
                psi[n + 1] = B.reshape(-1, d2, b)
                if direction == "right":
                    for k, phi in enumerate(states):
                        left[k][n + 1] = kernels.env_left(left[k][n], psi[n], phi[n])
                else:
                    for k, phi in enumerate(states):
                        right[k][n + 1] = kernels.env_right(right[k][n + 2], psi[n + 1], phi[n + 1])
                nf2 = float(np.vdot(f, f).real)
                res2 = max(norm_phi2 - nf2 + err * err, 0.0)
        if res2 <= tol * norm_phi2:
            break
        if last is not None and abs(last - res2) <= tol * norm_phi2:
            break
        last = res2
    return CanonicalMPS(psi, 0)


def simplify(target, strategy: Strategy = DEFAULT_STRATEGY, guess: MPS | None = None) -> CanonicalMPS:
    """Closest MPS to ``target`` within the bond and tolerance limits.

    The initial guess (when not given) is the SVD-truncated canonical form of
    the joined target. Variational two-site sweeps then refine it with
    environments built per summand. The added error is the exact distance
    between output and target, evaluated without squared-norm cancellation.
    """
    weights, states = _terms(target)
    in_error = float(sum(abs(w) * s.error for w, s in zip(weights, states)))
    clean = [s.with_error(0.0) for s in states]
    scale = sum(abs(w) * kernels_norm(s) for w, s in zip(weights, clean))
    dims = clean[0].physical_dimensions()
    if scale == 0:
        return zero_mps(dims).with_error(in_error)
    joined = join_mps(weights, clean)
    norm_phi = canonicalize(joined, 0, NO_TRUNCATION).norm()
    if norm_phi <= ZERO_THRESHOLD * scale:
        return zero_mps(dims).with_error(in_error + norm_phi)
    if strategy.method is Method.SVD_TRUNCATE or len(dims) == 1:
        out = canonicalize(joined, 0, strategy)
        result = out.with_error(in_error + out.error)
    else:
        if guess is None:
            guess = canonicalize(joined, 0, strategy)
        elif not isinstance(guess, CanonicalMPS):
            guess = canonicalize(guess, 0, NO_TRUNCATION)
        out = _variational(weights, clean, guess, strategy, norm_phi**2)
        err = _exact_norm(weights + [-1.0], clean + [out])
        result = out.with_error(in_error + err)
    if strategy.normalize:
        n = result.norm()
        if n > 0:
            result = CanonicalMPS(
                [t / n if i == result.center else t for i, t in enumerate(result)],
                result.center,
                result.error / n,
            )
    return result


def kernels_norm(m: MPS) -> float:
    if isinstance(m, CanonicalMPS):
        return m.norm()
    return math.sqrt(max(kernels.scprod(m.tensors, m.tensors).real, 0.0))


def combine(weights: Sequence, states: Sequence[MPS], strategy: Strategy = DEFAULT_STRATEGY,
            guess: MPS | None = None) -> CanonicalMPS:
    """Approximate ``sum_i weights[i] * states[i]``."""
    if len(weights) == 0 or len(weights) != len(states):
        raise ShapeError("combine needs equally many (>= 1) weights and states")
    return simplify(MPSSum(weights, states), strategy, guess)


def simplify_mpo(op, strategy: Strategy = Strategy(tolerance=1e-14, simplification_tolerance=1e-14)) -> MPO:
    """Compress an MPO (or MPOSum) by simplifying its flattened MPS form."""
    if isinstance(op, MPOSum):
        dims = op.mpos[0].dimensions()
        target = MPSSum(op.weights, [mpo_as_mps(m) for m in op.mpos])
    elif isinstance(op, MPO):
        dims = op.dimensions()
        target = mpo_as_mps(op)
    else:
        raise TypeError("simplify_mpo expects an MPO or MPOSum")
    out = simplify(target, strategy)
    return mps_as_mpo(out, dims)


# --------------------------------------------------------------------------
# operators on states


def mpo_apply_exact(op: MPO, v: MPS) -> MPS:
    """Contract ``op`` with ``v`` without truncation; bonds become ``beta*chi``."""
    if len(op) != len(v):
        raise ShapeError("operator and state have different lengths")
    out = []
    for W, A in zip(op, v):
        b, j, i, b2 = W.shape
        a, s, a2 = A.shape
        if i != s:
            raise ShapeError(f"operator input dimension {i} != state dimension {s}")
        C = np.einsum("bjic,aid->bajcd", W, A)
        out.append(C.reshape(b * a, j, b2 * a2))
    return MPS(out, op.norm_bound() * v.error)


def apply(op, v, strategy: Strategy = DEFAULT_STRATEGY, simplify_result: bool = True) -> CanonicalMPS:
    """Apply an MPO, MPOSum or MPOList to an MPS or MPSSum."""
    weights, states = _terms(v)
    if isinstance(op, MPOList):
        state = v
        for m in op.mpos:
            state = apply(m, state, strategy, simplify_result)
        return state
    if isinstance(op, MPOSum):
        new_w, new_s = [], []
        for wo, m in zip(op.weights, op.mpos):
            for ws, s in zip(weights, states):
                new_w.append(wo * ws)
                new_s.append(mpo_apply_exact(m, s))
    elif isinstance(op, MPO):
        new_w = weights
        new_s = [mpo_apply_exact(op, s) for s in states]
    else:
        raise TypeError(f"cannot apply {type(op).__name__}")
    if not simplify_result:
        return join_mps(new_w, new_s)
    return simplify(MPSSum(new_w, new_s), strategy)


def scprod(u, v) -> complex:
    """Inner product ``<u, v>`` (antilinear in ``u``)."""
    wu, su = _terms(u)
    wv, sv = _terms(v)
    total = 0j
    for a, x in zip(wu, su):
        for b, y in zip(wv, sv):
            total += np.conj(a) * b * kernels.scprod(x.tensors, y.tensors)
    return complex(total)


def expectation_local(v: MPS, O, site: int, O2=None, site2: int | None = None) -> complex:
    """``<v, O_site v>`` or ``<v, O_site O2_site2 v>`` without normalization."""
    ket = v.tensors
    ops = [(site, O)]
    if O2 is not None:
        if site2 is None:
            raise ValueError("site2 required with O2")
        ops.append((site2, O2))
    for n, op in ops:
        if not 0 <= n < len(ket):
            raise IndexError(f"site {n} out of range")
        op = np.asarray(op, dtype=np.complex128)
        ket[n] = np.einsum("ij,ajb->aib", op, ket[n])
    return complex(kernels.scprod(v.tensors, ket))


def _qenv_left(E, A, W, B):
    """E'[a', w', b'] = sum conj(A[a,s,a']) E[a,w,b] W[w,s,t,w'] B[b,t,b']."""
    T = np.tensordot(E, B, axes=(2, 0))  # a w t b'
    T = np.tensordot(T, W, axes=([1, 2], [0, 2]))  # a b' s w'
    return np.tensordot(A.conj(), T, axes=([0, 1], [0, 2])).transpose(0, 2, 1)


def _qenv_right(E, A, W, B):
    """E'[a, w, b] = sum conj(A[a,s,a']) W[w,s,t,w'] B[b,t,b'] E[a',w',b']."""
    T = np.tensordot(B, E, axes=(2, 2))  # b t a' w'
    T = np.tensordot(W, T, axes=([2, 3], [1, 3]))  # w s b a'
    return np.tensordot(A.conj(), T, axes=([1, 2], [1, 3]))  # a w b


def expectation_mpo(op: MPO, u: MPS, v: MPS | None = None) -> complex:
    """``<u, op v>`` by a sandwich contraction."""
    v = u if v is None else v
    E = np.ones((1, 1, 1), dtype=np.complex128)
    for A, W, B in zip(u, op, v):
        E = _qenv_left(E, A, W, B)
    return complex(E[0, 0, 0])


def hadamard(u: MPS, v: MPS) -> MPS:
    """Element-wise product; bond dimensions multiply."""
    if u.physical_dimensions() != v.physical_dimensions():
        raise ShapeError("hadamard needs equal physical dimensions")
    out = []
    for A, B in zip(u, v):
        a, d, a2 = A.shape
        b, _, b2 = B.shape
        out.append(np.einsum("asc,bsd->abscd", A, B).reshape(a * b, d, a2 * b2))
    eu, ev = u.error, v.error
    err = 0.0
    if eu or ev:
        err = eu * kernels_norm(v) + (kernels_norm(u) + eu) * ev
    return MPS(out, err)


def _product_error(states: Sequence[MPS]) -> float:
    # ||a (x) b - a' (x) b'|| <= e_a ||b|| + (||a|| + e_a) e_b, folded left to right
    nrm, err = 1.0, 0.0
    for s in states:
        ns = kernels_norm(s)
        err = err * ns + (nrm + err) * s.error
        nrm *= ns
    return err


def mps_tensor_product(states: Sequence[MPS], order: str = "A") -> MPS:
    """Tensor (Kronecker) product of states with order A (blocks) or B (interleaved)."""
    states = list(states)
    if not states:
        raise ShapeError("need at least one state")
    err = _product_error(states) if any(s.error for s in states) else 0.0
    if order == "A":
        return MPS([t for s in states for t in s], err)
    if order != "B":
        raise ValueError("order must be 'A' or 'B'")
    L = len(states[0])
    if any(len(s) != L for s in states):
        raise ShapeError("order B needs states of equal length")
    M = len(states)
    out = []
    for k in range(L):
        for m in range(M):
            A = states[m][k]
            before = math.prod(states[p][k].shape[2] for p in range(m))
            after = math.prod(states[p][k].shape[0] for p in range(m + 1, M))
            Ib = np.eye(before)
            Ia = np.eye(after)
            T = np.einsum("xy,asb,uv->xausybv", Ib, A, Ia)
            l, d, r = A.shape
            out.append(T.reshape(before * l * after, d, before * r * after))
    return MPS(out, err)


def mps_tensor_sum(states: Sequence[MPS], order: str = "A") -> MPS:
    """Sum of states each extended by all-ones vectors on the other factors."""
    states = list(states)
    if len(states) == 1:
        return states[0]
    terms = []
    for m, s in enumerate(states):
        factors = [
            s if p == m else MPS([np.ones((1, d, 1)) for d in q.physical_dimensions()])
            for p, q in enumerate(states)
        ]
        terms.append(mps_tensor_product(factors, order))
    return join_mps([1.0] * len(terms), terms)


def mpo_from_diagonal_mps(v: MPS) -> MPO:
    """Diagonal operator ``diag(v)``."""
    out = []
    for A in v:
        a, d, b = A.shape
        T = np.zeros((a, d, d, b), dtype=np.complex128)
        idx = np.arange(d)
        T[:, idx, idx, :] = A
        out.append(T)
    return MPO(out)


# --------------------------------------------------------------------------
# two-site forms


class TwoSiteLinearForm:
    """Projection of ``<bra, ket>`` onto the pair ``(n, n+1)`` of ``bra``.

    ``<bra, ket> = vdot(a_n, f_n)`` where ``a_n`` is the joined bra pair and
    ``f_n`` the ket contracted with the bra environments.
    """

    def __init__(self, bra: MPS, ket: MPS, n: int = 0):
        L = len(bra)
        if len(ket) != L or L < 2:
            raise ShapeError("linear form needs two states of equal length >= 2")
        if not 0 <= n < L - 1:
            raise ValueError("site index outside [0, L-2]")
        self.bra = bra.tensors
        self.ket = ket.tensors
        self.size = L
        one = np.ones((1, 1), dtype=np.complex128)
        self.left = [one] + [None] * L
        self.right = [None] * L + [one]
        for k in range(n):
            self.left[k + 1] = kernels.env_left(self.left[k], self.bra[k], self.ket[k])
        for k in range(L - 1, n + 1, -1):
            self.right[k] = kernels.env_right(self.right[k + 1], self.bra[k], self.ket[k])
        self.site = n

    @property
    def a(self) -> np.ndarray:
        n = self.site
        return np.tensordot(self.bra[n], self.bra[n + 1], axes=(2, 0))

    @property
    def f(self) -> np.ndarray:
        n = self.site
        return _two_site_projection(self.left[n], self.ket[n], self.ket[n + 1], self.right[n + 2])

    def update_right(self, A: np.ndarray, B: np.ndarray) -> None:
        """Store new bra tensors at ``(n, n+1)`` and move to ``n+1``."""
        n = self.site
        self.bra[n], self.bra[n + 1] = A, B
        self.left[n + 1] = kernels.env_left(self.left[n], A, self.ket[n])
        self.site = min(n + 1, self.size - 2)

    def update_left(self, A: np.ndarray, B: np.ndarray) -> None:
        """Store new bra tensors at ``(n, n+1)`` and move to ``n-1``."""
        n = self.site
        self.bra[n], self.bra[n + 1] = A, B
        self.right[n + 1] = kernels.env_right(self.right[n + 2], B, self.ket[n + 1])
        self.site = max(n - 1, 0)


class TwoSiteQuadraticForm:
    """Projection of ``<bra, op ket>`` onto the pair ``(n, n+1)``.

    Environments are ``L[a, w, b]`` with ``a`` a bra bond, ``w`` an operator
    bond and ``b`` a ket bond.  When ``bra is ket`` the updates replace both.
    """

    def __init__(self, bra: MPS, op: MPO, ket: MPS | None = None, n: int = 0):
        self.symmetric = ket is None or ket is bra
        ket = bra if ket is None else ket
        L = len(bra)
        if len(op) != L or len(ket) != L or L < 2:
            raise ShapeError("quadratic form needs equal lengths >= 2")
        if not 0 <= n < L - 1:
            raise ValueError("site index outside [0, L-2]")
        self.bra = bra.tensors
        self.ket = self.bra if self.symmetric else ket.tensors
        self.op = op.tensors
        self.size = L
        one = np.ones((1, 1, 1), dtype=np.complex128)
        self.left = [one] + [None] * L
        self.right = [None] * L + [one]
        for k in range(n):
            self.left[k + 1] = _qenv_left(self.left[k], self.bra[k], self.op[k], self.ket[k])
        for k in range(L - 1, n + 1, -1):
            self.right[k] = _qenv_right(self.right[k + 1], self.bra[k], self.op[k], self.ket[k])
        self.site = n

    def shape(self) -> tuple[int, int, int, int]:
        n = self.site
        return (self.left[n].shape[0], self.op[n].shape[1], self.op[n + 1].shape[1],
                self.right[n + 2].shape[0])

    def in_shape(self) -> tuple[int, int, int, int]:
        n = self.site
        return (self.left[n].shape[2], self.op[n].shape[2], self.op[n + 1].shape[2],
                self.right[n + 2].shape[2])

    @property
    def a(self) -> np.ndarray:
        n = self.site
        return np.tensordot(self.bra[n], self.bra[n + 1], axes=(2, 0))

    @property
    def b(self) -> np.ndarray:
        n = self.site
        return np.tensordot(self.ket[n], self.ket[n + 1], axes=(2, 0))

    def apply(self, x: np.ndarray) -> np.ndarray:
        """y[a,j,l,e] = sum L[a,w,b] W1[w,j,i,g] W2[g,l,k,h] R[e,h,d] x[b,i,k,d]."""
        n = self.site
        Lenv, R = self.left[n], self.right[n + 2]
        W1, W2 = self.op[n], self.op[n + 1]
        x = x.reshape(self.in_shape())
        T = np.tensordot(Lenv, x, axes=(2, 0))  # a w i k d
        T = np.tensordot(T, W1, axes=([1, 2], [0, 2]))  # a k d j g
        T = np.tensordot(T, W2, axes=([4, 1], [0, 2]))  # a d j l h
        T = np.tensordot(T, R, axes=([1, 4], [2, 1]))  # a j l e
        return T

    def matrix(self) -> np.ndarray:
        """Dense two-site effective operator G_n of shape (out_dim, in_dim)."""
        n = self.site
        G = np.einsum(
            "awb,wjig,glkh,ehd->ajlebikd",
            self.left[n], self.op[n], self.op[n + 1], self.right[n + 2], optimize=True,
        )
        so, si = self.shape(), self.in_shape()
        return G.reshape(math.prod(so), math.prod(si))

    def update_right(self, A: np.ndarray, B: np.ndarray) -> None:
        n = self.site
        self.bra[n], self.bra[n + 1] = A, B
        self.left[n + 1] = _qenv_left(self.left[n], A, self.op[n], self.ket[n])
        self.site = min(n + 1, self.size - 2)

    def update_left(self, A: np.ndarray, B: np.ndarray) -> None:
        n = self.site
        self.bra[n], self.bra[n + 1] = A, B
        self.right[n + 1] = _qenv_right(self.right[n + 2], B, self.op[n + 1], self.ket[n + 1])
        self.site = max(n - 1, 0)


def two_site_linear_form(v: MPS, w: MPS, n: int) -> TwoSiteLinearForm:
    return TwoSiteLinearForm(v, w, n)


def two_site_quadratic_form(v: MPS, op: MPO, w: MPS, n: int) -> TwoSiteQuadraticForm:
    return TwoSiteQuadraticForm(v, op, None if w is v else w, n)
