"""Pure-NumPy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np


def truncation_rank(s: np.ndarray, tolerance: float, max_bond: int) -> tuple[int, float]:
    """Return ``(rank, dropped_weight_squared)`` for descending singular values."""
    n = s.shape[0]
    if n == 0:
        return 0, 0.0
    r = int(np.count_nonzero(s > tolerance * s[0]))
    r = max(r, 1)
    if max_bond > 0:
        r = min(r, max_bond)
    tail = s[r:][::-1]
    return r, float(np.sum(tail * tail))


def env_left(E: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    ca, d, ca2 = A.shape
    cb, _, cb2 = B.shape
    T = (E @ B.reshape(cb, d * cb2)).reshape(ca * d, cb2)
    return A.reshape(ca * d, ca2).conj().T @ T


def env_right(E: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    ca, d, ca2 = A.shape
    cb, _, cb2 = B.shape
    T = (B.reshape(cb * d, cb2) @ E.T).reshape(cb, d * ca2)
    return A.reshape(ca, d * ca2).conj() @ T.T


def scprod(bra: list, ket: list) -> complex:
    E = np.ones((1, 1), dtype=np.complex128)
    for A, B in zip(bra, ket):
        E = env_left(E, A, B)
    return complex(E[0, 0])
