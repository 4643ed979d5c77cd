"""Maxvol pivoting and tensor cross-interpolation from black-box samples."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from ..core import DEFAULT_STRATEGY, MPS, Method, Strategy, canonicalize, schmidt_split
from .mesh import Mesh

# --------------------------------------------------------------------------
# maxvol


def maxvol_square(M: np.ndarray, delta: float = 1e-2, max_iter: int = 500) -> np.ndarray:
    """Rows of the tall matrix ``M`` (r x c) forming a quasi-maximal volume block.

    Starts from LU pivots and swaps rows until ``|M M[rows]^-1| <= 1 + delta``.
    """
    M = np.asarray(M)
    r, c = M.shape
    if r < c:
        raise ValueError("maxvol needs a tall matrix")
    if c == 0:
        return np.zeros(0, dtype=int)
    rows = _lu_rows(M)
    B = _solve_rows(M, rows)
    for _ in range(max_iter):
        flat = int(np.argmax(np.abs(B)))
        i, j = divmod(flat, c)
        if abs(B[i, j]) <= 1.0 + delta:
            break
        rows[j] = i
        # rank-one update of B = M M[rows]^-1 after swapping row j for row i
        bj = B[:, j].copy()
        bi = B[i, :].copy()
        bi[j] -= 1.0
        B -= np.outer(bj, bi / B[i, j])
    return np.array(rows, dtype=int)


def _lu_rows(M: np.ndarray) -> np.ndarray:
    """Row pivots of a partial-pivoting LU factorization."""
    A = np.array(M, dtype=np.complex128)
    r, c = A.shape
    perm = np.arange(r)
    for k in range(c):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if p != k:
            A[[k, p]] = A[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        if A[k, k] != 0:
            A[k + 1 :, k:] -= np.outer(A[k + 1 :, k] / A[k, k], A[k, k:])
    return perm[:c].copy()


def _solve_rows(M: np.ndarray, rows) -> np.ndarray:
    return scipy.linalg.solve(M[rows].T, M.T).T


def maxvol_rectangular(
    M: np.ndarray, delta: float = 1e-2, max_extra: int | None = None, min_extra: int = 0
) -> np.ndarray:
    """Square maxvol followed by greedy addition of the rows with largest
    coefficient norm, until every row norm of ``M M[rows]^+`` is below
    ``sqrt(1 + delta)`` or ``max_extra`` rows were added."""
    M = np.asarray(M)
    r, c = M.shape
    rows = list(maxvol_square(M, delta))
    extra_cap = r - c if max_extra is None else min(max_extra, r - c)
    B = _solve_rows(M, rows)
    added = 0
    while added < extra_cap:
        norms = np.sum(np.abs(B) ** 2, axis=1)
        norms[rows] = -1.0
        i = int(np.argmax(norms))
        if norms[i] <= 1.0 + delta and added >= min_extra:
            break
        rows.append(i)
        added += 1
        B = M @ np.linalg.pinv(M[rows])
    return np.array(rows, dtype=int)


def maxvol(M: np.ndarray, variant: str = "SQUARE", **params) -> np.ndarray:
    """Quasi-maximal-volume row selection; handles rank-deficient input.

    For a rank-deficient ``M`` the pivots are computed on an orthonormal
    basis of its column space and a warning is issued.
    """
    M = np.asarray(M, dtype=np.complex128)
    r, c = M.shape
    if r < c:
        raise ValueError("maxvol needs r >= c")
    Q, R, P = scipy.linalg.qr(M, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > 1e-14 * diag[0])) if diag.size and diag[0] > 0 else 0
    if rank < c:
        warnings.warn(f"maxvol: matrix has rank {rank} < {c}; returning a reduced pivot set", RuntimeWarning)
        if rank == 0:
            return np.zeros(0, dtype=int)
        M = Q[:, :rank]
    if variant.upper() == "SQUARE":
        return maxvol_square(M, **params)
    if variant.upper() == "RECTANGULAR":
        return maxvol_rectangular(M, **params)
    raise ValueError(f"unknown maxvol variant {variant!r}")


# --------------------------------------------------------------------------
# black boxes


class BlackBox:
    """Cached oracle for tensor entries ``f(s_0, ..., s_{L-1})``.

    ``function`` maps an integer array of shape ``(batch, L)`` to values.
    ``evaluations`` counts distinct entries actually computed.
    """

    def __init__(self, function: Callable[[np.ndarray], np.ndarray], physical_dimensions,
                 mesh: Mesh | None = None):
        self.function = function
        self.physical_dimensions = [int(d) for d in physical_dimensions]
        self.mesh = mesh
        self.evaluations = 0
        self._cache: dict[tuple, complex] = {}

    @property
    def sites(self) -> int:
        return len(self.physical_dimensions)

    def __call__(self, indices) -> np.ndarray:
        indices = np.atleast_2d(np.asarray(indices, dtype=np.int64))
        keys = [tuple(row) for row in indices.tolist()]
        missing = list(dict.fromkeys(k for k in keys if k not in self._cache))
        if missing:
            vals = np.asarray(self.function(np.array(missing, dtype=np.int64)), dtype=np.complex128).reshape(-1)
            if vals.size != len(missing):
                raise ValueError("black-box function returned the wrong number of values")
            self._cache.update(zip(missing, vals.tolist()))
            self.evaluations += len(missing)
        return np.array([self._cache[k] for k in keys], dtype=np.complex128)

    @classmethod
    def from_function(cls, f: Callable[..., np.ndarray], mesh: Mesh) -> "BlackBox":
        """Wrap ``f(x)`` where ``x`` has shape ``(batch, dims)``."""

        def evaluate(bits):
            return f(mesh.coordinates_from_bits(bits))

        return cls(evaluate, [2] * mesh.sites, mesh)

    @classmethod
    def from_mps(cls, state: MPS) -> "BlackBox":
        tensors = state.tensors

        def evaluate(idx):
            v = np.ones((idx.shape[0], 1), dtype=np.complex128)
            for k, A in enumerate(tensors):
                v = np.einsum("ba,bac->bc", v, A[:, idx[:, k], :].transpose(1, 0, 2))
            return v[:, 0]

        return cls(evaluate, state.physical_dimensions())


def mps_evaluate(state: MPS, idx: np.ndarray) -> np.ndarray:
    """Entries of ``state`` at the multi-indices in ``idx`` (batch, L)."""
    idx = np.atleast_2d(idx)
    v = np.ones((idx.shape[0], 1), dtype=np.complex128)
    for k, A in enumerate(state):
        v = np.einsum("ba,bac->bc", v, A[:, idx[:, k], :].transpose(1, 0, 2))
    return v[:, 0]


# --------------------------------------------------------------------------
# cross interpolation


@dataclass
class CrossReport:
    sweeps: int = 0
    evaluations: int = 0
    validation_error: float = float("inf")
    converged: bool = False
    trace: list = field(default_factory=list)


def _unique_rows(a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return a
    _, idx = np.unique(a, axis=0, return_index=True)
    return a[np.sort(idx)]


def _fiber(bb: BlackBox, left: np.ndarray, mids: list[int], right: np.ndarray) -> np.ndarray:
    """Values f(left[i], s_1..s_m, right[j]) as an array (r_l, d_1, ..., d_m, r_r)."""
    grids = np.meshgrid(*[np.arange(d) for d in mids], indexing="ij")
    mid = np.stack([g.reshape(-1) for g in grids], axis=1) if mids else np.zeros((1, 0), dtype=np.int64)
    rl, rr, nm = left.shape[0], right.shape[0], mid.shape[0]
    idx = np.concatenate(
        [
            np.repeat(left, nm * rr, axis=0),
            np.tile(np.repeat(mid, rr, axis=0), (rl, 1)),
            np.tile(right, (rl * nm, 1)),
        ],
        axis=1,
    )
    return bb(idx).reshape([rl] + list(mids) + [rr])


class _State:
    def __init__(self, bb: BlackBox, start_rank: int, seed: int):
        rng = np.random.default_rng(seed)
        L = bb.sites
        d = bb.physical_dimensions
        start = np.stack([rng.integers(0, dk, size=start_rank) for dk in d], axis=1)
        self.L = L
        self.d = d
        # left[k]: multi-indices for sites < k; right[k]: for sites >= k
        self.left = [_unique_rows(start[:, :k]) if k else np.zeros((1, 0), dtype=np.int64) for k in range(L + 1)]
        self.right = [_unique_rows(start[:, k:]) if k < L else np.zeros((1, 0), dtype=np.int64) for k in range(L + 1)]
        self.left[0] = np.zeros((1, 0), dtype=np.int64)
        self.right[L] = np.zeros((1, 0), dtype=np.int64)
        self.cores: list[np.ndarray | None] = [None] * L


def _validation_error(bb: BlackBox, state: MPS, samples: np.ndarray) -> float:
    exact = bb(samples)
    approx = mps_evaluate(state, samples)
    return float(np.max(np.abs(exact - approx)) / max(np.max(np.abs(exact)), 1e-30))


def _dmrg_sweep(bb, st: _State, strategy, direction):
    L, d = st.L, st.d
    bonds = range(L - 1) if direction == "right" else range(L - 2, -1, -1)
    for k in bonds:
        F = _fiber(bb, st.left[k], [d[k], d[k + 1]], st.right[k + 2])
        rl, _, _, rr = F.shape
        A, B, _ = schmidt_split(F.reshape(rl * d[k], d[k + 1] * rr), strategy, direction)
        if direction == "right":
            rows = maxvol(A, "SQUARE")
            core = A @ np.linalg.inv(A[rows])
            st.cores[k] = core.reshape(rl, d[k], -1)
            li, s = np.divmod(rows, d[k])
            st.left[k + 1] = np.concatenate([st.left[k][li], s[:, None]], axis=1)
            if k == L - 2:
                # last pair: keep the fiber restricted to the new left pivots
                st.cores[k + 1] = F.reshape(rl * d[k], d[k + 1] * rr)[rows].reshape(len(rows), d[k + 1], rr)
        else:
            V = B.T
            cols = maxvol(V, "SQUARE")
            core = (V @ np.linalg.inv(V[cols])).T
            st.cores[k + 1] = core.reshape(-1, d[k + 1], rr)
            s, rj = np.divmod(cols, rr)
            st.right[k + 1] = np.concatenate([s[:, None], st.right[k + 2][rj]], axis=1)
            if k == 0:
                st.cores[0] = F.reshape(rl * d[k], d[k + 1] * rr)[:, cols].reshape(rl, d[k], len(cols))


def _maxvol_sweep(bb, st: _State, strategy, direction, rank_step: int):
    L, d = st.L, st.d
    sites = range(L - 1) if direction == "right" else range(L - 1, 0, -1)
    max_bond = strategy.max_bond
    for k in sites:
        F = _fiber(bb, st.left[k], [d[k]], st.right[k + 1])
        rl, _, rr = F.shape
        if direction == "right":
            M = F.reshape(rl * d[k], rr)
            Q, _ = np.linalg.qr(M)
            Q = _column_basis(Q, M)
            extra = rank_step if max_bond is None else max(0, min(rank_step, max_bond - Q.shape[1]))
            rows = maxvol(Q, "RECTANGULAR", max_extra=extra, min_extra=extra) if Q.shape[1] else np.array([0])
            rows = rows[: Q.shape[0]]
            core = M @ np.linalg.pinv(M[rows]) if len(rows) else M
            st.cores[k] = core.reshape(rl, d[k], -1)
            li, s = np.divmod(rows, d[k])
            st.left[k + 1] = np.concatenate([st.left[k][li], s[:, None]], axis=1)
            if k == L - 2:
                st.cores[L - 1] = _fiber(bb, st.left[L - 1], [d[L - 1]], st.right[L])
        else:
            M = F.reshape(rl, d[k] * rr).T
            Q, _ = np.linalg.qr(M)
            Q = _column_basis(Q, M)
            extra = rank_step if max_bond is None else max(0, min(rank_step, max_bond - Q.shape[1]))
            cols = maxvol(Q, "RECTANGULAR", max_extra=extra, min_extra=extra) if Q.shape[1] else np.array([0])
            core = (M @ np.linalg.pinv(M[cols])).T
            st.cores[k] = core.reshape(-1, d[k], rr)
            s, rj = np.divmod(cols, rr)
            st.right[k] = np.concatenate([s[:, None], st.right[k + 1][rj]], axis=1)
            if k == 1:
                st.cores[0] = _fiber(bb, st.left[0], [d[0]], st.right[1])


def _column_basis(Q: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Orthonormal basis restricted to the numerical rank of ``M``."""
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return Q[:, :1]
    rank = max(1, int(np.sum(s > 1e-14 * s[0])))
    return Q[:, :rank]


def cross_interpolation(
    bb: BlackBox,
    variant: str = "DMRG",
    strategy: Strategy = DEFAULT_STRATEGY,
    start_rank: int = 1,
    max_sweeps: int = 10,
    tol: float = 1e-10,
    seed: int = 0,
    validation_samples: int = 1000,
    rank_step: int = 1,
) -> tuple[MPS, CrossReport]:
    """Tensor cross-interpolation of a black box.

    DMRG: two-site fibers split by truncated SVD with maxvol pivots.
    MAXVOL: one-site fibers with rectangular maxvol for rank growth.
    A sweep goes left to right and back; after each sweep the relative max
    error on a fixed random validation set is measured.
    """
    if bb.sites < 2:
        raise ValueError("cross interpolation needs at least two sites")
    variant = variant.upper()
    if variant not in ("DMRG", "MAXVOL"):
        raise ValueError(f"unknown variant {variant!r}")
    st = _State(bb, start_rank, seed)
    rng = np.random.default_rng(seed + 1)
    samples = np.stack([rng.integers(0, dk, size=validation_samples) for dk in bb.physical_dimensions], axis=1)
    report = CrossReport()
    state = None
    # pivot probing can leave redundant bonds; recompress with the SVD cutoff
    compress = strategy.replace(method=Method.SVD_TRUNCATE)
    for sweep in range(max_sweeps):
        for direction in ("right", "left"):
            if variant == "DMRG":
                _dmrg_sweep(bb, st, strategy, direction)
            else:
                _maxvol_sweep(bb, st, strategy, direction, rank_step)
        state = canonicalize(MPS(st.cores), 0, compress).with_error(0.0)
        err = _validation_error(bb, state, samples)
        report.sweeps = sweep + 1
        report.validation_error = err
        report.trace.append((sweep + 1, err, state.max_bond_dimension()))
        if err <= tol:
            report.converged = True
            break
    report.evaluations = bb.evaluations
    return state, report
