"""Refining sampled functions by one or more qubits."""

from __future__ import annotations

import numpy as np

from ..blas import apply
from ..core import (
    DEFAULT_STRATEGY,
    MPO,
    MPOSum,
    MPS,
    Strategy,
    mpo_from_local_operators,
    mpo_identity,
)
from ..funcrep.mesh import Interval
from ..lapack.qft import qft_mpo
from .derivatives import Boundary, _boundary, mpo_weighted_shifts

_P0 = np.diag([1.0, 0.0])
_P1 = np.diag([0.0, 1.0])


def _basis_op(n: int, row: int, col: int) -> MPO:
    """``|row><col|`` on ``n`` qubits as a product MPO."""
    ops = []
    for k in range(n):
        r = (row >> (n - 1 - k)) & 1
        c = (col >> (n - 1 - k)) & 1
        M = np.zeros((2, 2))
        M[r, c] = 1.0
        ops.append(M)
    return mpo_from_local_operators(ops)


def _extend(op: MPO, local: np.ndarray) -> MPO:
    """``op`` on the first sites with ``local`` on one appended last site."""
    return MPO(op.tensors + [np.asarray(local, dtype=np.complex128).reshape(1, 2, 2, 1)])


def fd_midpoint_operator(n: int, boundary=Boundary.OPEN) -> MPOSum:
    """``(O v)_i = (v_i + v_{i+1}) / 2``.

    At ``i = N - 1`` the OPEN boundary extrapolates linearly,
    ``(3 v_{N-1} - v_{N-2}) / 2``; PERIODIC uses ``v_0``.
    """
    boundary = _boundary(boundary)
    N = 2**n
    O = mpo_weighted_shifts(n, {0: 0.5, 1: 0.5}, boundary)
    if boundary is Boundary.PERIODIC:
        return MPOSum([1.0], [O])
    return MPOSum([1.0, 1.0, -0.5], [O, _basis_op(n, N - 1, N - 1), _basis_op(n, N - 1, N - 2)])


def fd_interpolation(
    v: MPS,
    interval: Interval | None = None,
    boundary=Boundary.OPEN,
    strategy: Strategy = DEFAULT_STRATEGY,
) -> MPS:
    """Second-order refinement onto ``n + 1`` qubits.

    The new qubit is the least significant one: output ``2 i`` copies
    ``v_i`` and output ``2 i + 1`` is the midpoint average from
    :func:`fd_midpoint_operator`.  The operator
    ``I (x) |0><0| + O (x) |1><1|`` acts on ``v (x) (1, 1)``.  On a
    half-open interval the output lives on ``interval.refine(1)``.
    """
    n = len(v)
    if interval is not None and interval.n_qubits != n:
        raise ValueError("interval and state sizes differ")
    O = fd_midpoint_operator(n, boundary)
    eye = mpo_identity(n, 2)
    terms = [_extend(eye, _P0)] + [_extend(m, _P1) for m in O.mpos]
    M = MPOSum([1.0] + O.weights, terms)
    extended = MPS(v.tensors + [np.ones((1, 2, 1), dtype=np.complex128)], v.error)
    return apply(M, extended, strategy)


def _sign_extend(v: MPS, extra: int) -> MPS:
    """Repeat the last site's bit on ``extra`` new sites (two's complement padding)."""
    if extra == 0:
        return v
    ts = v.tensors
    A = ts[-1]
    a, d, _ = A.shape
    last = np.zeros((a, d, d), dtype=np.complex128)
    for s in range(d):
        last[:, s, s] = A[:, s, 0]
    copy = np.zeros((d, d, d), dtype=np.complex128)
    for s in range(d):
        copy[s, s, s] = 1.0
    tail = [copy] * (extra - 1) + [np.eye(d, dtype=np.complex128).reshape(d, d, 1)]
    return MPS(ts[:-1] + [last] + tail, v.error)


def fourier_interpolation(
    v: MPS,
    extra_qubits: int,
    interval: Interval | None = None,
    strategy: Strategy = DEFAULT_STRATEGY,
) -> MPS:
    """Spectral refinement from ``n`` to ``n + extra_qubits`` qubits.

    The spectrum is zero-padded symmetrically in two's complement order and
    rescaled by ``sqrt(2**extra_qubits)``.  Band-limited periodic inputs are
    reproduced exactly on ``interval.refine(extra_qubits)``.  The Nyquist
    mode is kept on the negative side.
    """
    if extra_qubits < 0:
        raise ValueError("extra_qubits must be >= 0")
    n = len(v)
    if interval is not None and interval.n_qubits != n:
        raise ValueError("interval and state sizes differ")
    spectrum = apply(qft_mpo(n), v, strategy)
    padded = _sign_extend(spectrum, extra_qubits)
    out = apply(qft_mpo(n + extra_qubits, inverse=True), padded, strategy)
    return out * np.sqrt(2.0**extra_qubits)
