"""Finite-difference and spectral differentiation operators on quantized grids."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import factorial
from typing import Mapping

import numpy as np

from ..blas import mpo_from_diagonal_mps
from ..core import MPO, MPOList, MPS, join_mps, product_state
from ..funcrep.factories import affine_polynomial_mps
from ..funcrep.mesh import Interval
from ..lapack.qft import qft_mpo


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


def _boundary(b) -> Boundary:
    return Boundary(b.lower()) if isinstance(b, str) else Boundary(b)


def mpo_weighted_shifts(n: int, weights: Mapping[int, complex], boundary=Boundary.PERIODIC) -> MPO:
    """``sum_m w_m D_m`` with ``(D_m v)_i = v_{i+m}`` on ``2**n`` points.

    PERIODIC wraps ``i + m`` modulo ``2**n``; OPEN drops out-of-range
    entries.  The MPO is a carry automaton run from the least significant
    bit (last site) to the most significant one: the bond holds the offset
    still to be added, so output bit ``o``, input bit ``s`` and incoming
    offset ``c`` satisfy ``o + c = s + 2 c'``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    boundary = _boundary(boundary)
    weights = {int(m): complex(w) for m, w in weights.items() if w != 0}
    if not weights:
        weights = {0: 0.0}
    # offsets alive on each bond, from the right edge towards the left
    states = [sorted(weights)]
    for _ in range(n):
        nxt = set()
        for c in states[-1]:
            for o in range(2):
                for s in range(2):
                    if (o + c - s) % 2 == 0:
                        nxt.add((o + c - s) // 2)
        states.append(sorted(nxt))
    states = states[::-1]  # states[k] lives on the bond left of site k
    if boundary is Boundary.OPEN:
        # only offsets that can reach zero at the left edge survive
        keep = [{0}]
        for k in range(n):
            alive = set()
            for c in states[k + 1]:
                for o in range(2):
                    for s in range(2):
                        if (o + c - s) % 2 == 0 and (o + c - s) // 2 in keep[-1]:
                            alive.add(c)
            keep.append(alive)
        states = [[c for c in states[k] if c in keep[k]] for k in range(n + 1)]
        states[0] = [0]
    tensors = []
    for k in range(n):
        left, right = states[k], states[k + 1]
        li = {c: i for i, c in enumerate(left)}
        T = np.zeros((len(left), 2, 2, len(right)), dtype=np.complex128)
        for j, c in enumerate(right):
            for o in range(2):
                for s in range(2):
                    if (o + c - s) % 2 == 0 and (o + c - s) // 2 in li:
                        T[li[(o + c - s) // 2], o, s, j] = 1.0
        tensors.append(T)
    # the left edge accepts every remaining offset (wraps for PERIODIC)
    tensors[0] = tensors[0].sum(axis=0, keepdims=True)
    w = np.array([weights[c] for c in states[n]], dtype=np.complex128)
    tensors[-1] = np.tensordot(tensors[-1], w, axes=(3, 0))[..., None]
    return MPO(tensors)


def fd_stencil(derivative: int, accuracy_order: int) -> dict[int, float]:
    """Central finite-difference weights for unit spacing.

    Solves the Vandermonde system ``sum_m c_m m**k / k! = delta_{k, derivative}``.
    """
    if derivative < 1:
        raise ValueError("derivative must be >= 1")
    if accuracy_order < 2 or accuracy_order % 2:
        raise ValueError("accuracy_order must be a positive even integer")
    points = 2 * ((derivative + 1) // 2) - 1 + accuracy_order
    r = points // 2
    m = np.arange(-r, r + 1)
    V = np.array([m.astype(float) ** k / factorial(k) for k in range(2 * r + 1)])
    rhs = np.zeros(2 * r + 1)
    rhs[derivative] = 1.0
    c = np.linalg.solve(V, rhs)
    return {int(k): float(v) for k, v in zip(m, c) if abs(v) > 1e-14}


def finite_differences_mpo(
    derivative: int,
    accuracy_order: int,
    interval: Interval,
    boundary=Boundary.OPEN,
) -> MPO:
    """Central-difference derivative of order ``derivative`` with step ``interval.step``.

    The three-point second derivative is ``(D_{+1} + D_{-1} - 2) / h**2``.
    """
    h = interval.step
    stencil = fd_stencil(derivative, accuracy_order)
    return mpo_weighted_shifts(
        interval.n_qubits, {m: c / h**derivative for m, c in stencil.items()}, boundary
    )


def _period(interval: Interval) -> float:
    # samples x_0..x_{N-1} repeat with period N h
    return interval.size * interval.step


@dataclass(frozen=True)
class MomentumGrid:
    """Wave numbers of a ``2**n_qubits`` point periodic grid of period ``length``.

    Index ``k`` holds ``2 pi k / length`` below ``N/2`` and
    ``2 pi (k - N) / length`` from ``N/2`` on (two's complement order).
    """

    n_qubits: int
    length: float

    @property
    def size(self) -> int:
        return 2**self.n_qubits

    def values(self) -> np.ndarray:
        k = np.arange(self.size)
        k = np.where(k < self.size // 2, k, k - self.size)
        return 2 * np.pi * k / self.length

    @property
    def nyquist(self) -> float:
        return -np.pi * self.size / self.length

    def power_mps(self, exponent: int, coefficient: complex = 1.0, reversed_bits: bool = True) -> MPS:
        """``coefficient * p**exponent`` per index as an MPS.

        With ``reversed_bits`` site ``j`` holds the bit of weight ``2**j``,
        the layout produced by the unflipped transform.
        """
        n = self.n_qubits
        scale = 2 * np.pi / self.length
        w = scale * 2.0 ** np.arange(n)
        w[-1] = -w[-1]  # sign bit
        coeffs = np.zeros(exponent + 1, dtype=np.complex128)
        coeffs[exponent] = coefficient
        m = affine_polynomial_mps(coeffs, 0.0, w)
        if not reversed_bits:
            m = MPS([t.transpose(2, 1, 0) for t in reversed(m.tensors)])
        return m


def fourier_derivative_mpo(p_exponent: int, interval: Interval) -> MPOList:
    """Spectral ``d^m/dx^m`` as ``[QFT layers, diag((i p)**m), inverse QFT layers]``.

    The grid is treated as periodic with period ``N * step``.  For odd
    ``m`` the Nyquist mode is dropped so real input stays real.
    """
    if p_exponent < 0:
        raise ValueError("p_exponent must be >= 0")
    n = interval.n_qubits
    grid = MomentumGrid(n, _period(interval))
    G = grid.power_mps(p_exponent, 1j**p_exponent)
    if p_exponent % 2:
        # Nyquist index: only the sign bit set (last site in reversed layout)
        e = product_state([[1.0, 0.0]] * (n - 1) + [[0.0, 1.0]])
        G = join_mps([1.0, -((1j * grid.nyquist) ** p_exponent)], [G, e])
    forward = qft_mpo(n)
    inverse = qft_mpo(n, inverse=True)
    return MPOList(forward.mpos + [mpo_from_diagonal_mps(G)] + inverse.mpos)
