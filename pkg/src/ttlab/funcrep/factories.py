"""Closed-form MPS encodings of elementary functions on regular grids.

With ``x = a + h * i`` and ``i = sum_k s_k 2**(n-1-k)``, the coordinate is
affine in the site bits, so exponentials are product states and polynomials
need one bond per power.
"""

from __future__ import annotations

import enum
from math import comb
from typing import Sequence

import numpy as np

from ..core import MPS, join_mps
from .mesh import Interval


class Kind(enum.Enum):
    CONSTANT = "constant"
    INTERVAL = "interval"
    EXP_SUM = "exp_sum"
    COS = "cos"
    SIN = "sin"
    HEAVISIDE = "heaviside"


def _bit_weights(interval: Interval) -> tuple[float, np.ndarray]:
    if not interval.regular:
        raise NotImplementedError(
            "closed-form factories need a regular grid; sample Chebyshev grids by cross interpolation"
        )
    n = interval.n_qubits
    h = interval.step
    return interval.a, h * 2.0 ** np.arange(n - 1, -1, -1)


def mps_constant(value: complex, interval: Interval) -> MPS:
    n = interval.n_qubits
    ts = [np.ones((1, 2, 1), dtype=np.complex128) for _ in range(n)]
    ts[0] = ts[0] * value
    return MPS(ts)


def mps_interval(interval: Interval) -> MPS:
    """Grid coordinates ``x_i`` with bond dimension 2."""
    a, w = _bit_weights(interval)
    n = len(w)
    if n == 1:
        return MPS([np.array([a, a + w[0]], dtype=np.complex128).reshape(1, 2, 1)])
    ts = []
    for k in range(n):
        if k == 0:
            T = np.zeros((1, 2, 2), dtype=np.complex128)
            for s in range(2):
                T[0, s] = [1.0, a + w[k] * s]
        elif k == n - 1:
            T = np.zeros((2, 2, 1), dtype=np.complex128)
            for s in range(2):
                T[:, s, 0] = [w[k] * s, 1.0]
        else:
            T = np.zeros((2, 2, 2), dtype=np.complex128)
            for s in range(2):
                T[:, s, :] = [[1.0, w[k] * s], [0.0, 1.0]]
        ts.append(T)
    return MPS(ts)


def mps_exponential(k: complex, interval: Interval, coefficient: complex = 1.0) -> MPS:
    """``coefficient * exp(k x)`` as a product state."""
    a, w = _bit_weights(interval)
    ts = [np.array([1.0, np.exp(k * wk)], dtype=np.complex128).reshape(1, 2, 1) for wk in w]
    ts[0] = ts[0] * (coefficient * np.exp(k * a))
    return MPS(ts)


def mps_exp_sum(terms: Sequence[tuple[complex, complex]], interval: Interval) -> MPS:
    """``sum_j c_j exp(k_j x)`` from ``(c_j, k_j)`` pairs; bond = number of terms."""
    terms = list(terms)
    if not terms:
        raise ValueError("need at least one exponential term")
    states = [mps_exponential(k, interval, c) for c, k in terms]
    return join_mps([1.0] * len(states), states)


def mps_cos(k: float, interval: Interval, amplitude: float = 1.0, phase: float = 0.0) -> MPS:
    """``amplitude * cos(k x + phase)``, bond dimension 2."""
    c = 0.5 * amplitude
    return mps_exp_sum([(c * np.exp(1j * phase), 1j * k), (c * np.exp(-1j * phase), -1j * k)], interval)


def mps_sin(k: float, interval: Interval, amplitude: float = 1.0, phase: float = 0.0) -> MPS:
    """``amplitude * sin(k x + phase)``, bond dimension 2."""
    c = 0.5 * amplitude / 1j
    return mps_exp_sum([(c * np.exp(1j * phase), 1j * k), (-c * np.exp(-1j * phase), -1j * k)], interval)


def _threshold_index(interval: Interval, x0: float) -> int:
    """Smallest grid index with ``x_i >= x0`` (``N`` when none)."""
    N = interval.size
    h = interval.step
    i0 = int(np.clip(np.ceil((x0 - interval.a) / h), 0, N))
    while i0 > 0 and interval.points_at(i0 - 1) >= x0:
        i0 -= 1
    while i0 < N and interval.points_at(i0) < x0:
        i0 += 1
    return i0


def _comparator(n: int, threshold: int, greater: bool) -> MPS:
    """Indicator of ``i >= threshold`` (greater) or ``i <= threshold`` as a 2-state automaton.

    State 0 means "equal so far", state 1 means "already decided true".
    """
    bits = [(threshold >> (n - 1 - k)) & 1 for k in range(n)]
    ts = []
    for k in range(n):
        t = bits[k]
        T = np.zeros((2, 2, 2), dtype=np.complex128)
        for s in range(2):
            if s == t:
                T[0, s, 0] = 1.0
            elif (s > t) == greater:
                T[0, s, 1] = 1.0
            T[1, s, 1] = 1.0
        ts.append(T)
    ts[0] = ts[0][:1]
    ts[-1] = ts[-1] @ np.array([1.0, 1.0]).reshape(2, 1)
    return MPS(ts)


def mps_heaviside(interval: Interval, x0: float = 0.0, sign: int = 1) -> MPS:
    """``Theta(sign * (x - x0))`` with ``Theta(0) = 1``; bond dimension 2."""
    _bit_weights(interval)
    n, N = interval.n_qubits, interval.size
    if sign >= 0:
        i0 = _threshold_index(interval, x0)
        if i0 >= N:
            return mps_constant(0.0, interval)
        return _comparator(n, i0, True)
    # x_i <= x0  <=>  i <= i1 with i1 the last index at or below x0
    above = _threshold_index(interval, np.nextafter(x0, np.inf))
    i1 = above - 1
    if i1 < 0:
        return mps_constant(0.0, interval)
    return _comparator(n, i1, False)


def mps_elementary(kind, params: dict | None, interval: Interval) -> MPS:
    """Dispatch for the closed-form factories.

    ``params`` by kind: CONSTANT ``{"value"}``; EXP_SUM ``{"terms": [(c, k), ...]}``;
    COS/SIN ``{"k", "amplitude", "phase"}``; HEAVISIDE ``{"x0", "sign"}``.
    """
    kind = Kind(kind.lower()) if isinstance(kind, str) else kind
    params = dict(params or {})
    if kind is Kind.CONSTANT:
        if not interval.regular:
            _bit_weights(interval)
        return mps_constant(params.get("value", 1.0), interval)
    if kind is Kind.INTERVAL:
        return mps_interval(interval)
    if kind is Kind.EXP_SUM:
        return mps_exp_sum(params["terms"], interval)
    if kind is Kind.COS:
        return mps_cos(params.get("k", 1.0), interval, params.get("amplitude", 1.0), params.get("phase", 0.0))
    if kind is Kind.SIN:
        return mps_sin(params.get("k", 1.0), interval, params.get("amplitude", 1.0), params.get("phase", 0.0))
    if kind is Kind.HEAVISIDE:
        return mps_heaviside(interval, params.get("x0", 0.0), params.get("sign", 1))
    raise ValueError(f"unknown kind {kind}")


def mps_from_polynomial(coeffs: Sequence[complex], interval: Interval) -> MPS:
    """``p(x) = sum_k coeffs[k] x**k`` on the grid; bond dimension ``deg + 1``."""
    a, w = _bit_weights(interval)
    return affine_polynomial_mps(coeffs, a, w)


def affine_polynomial_mps(coeffs: Sequence[complex], offset: complex, weights: Sequence[float]) -> MPS:
    """``p(y)`` for ``y = offset + sum_k weights[k] s_k`` over qubit sites.

    The bond carries the powers ``y**0..y**d`` of the partial coordinate and
    each site applies the binomial transfer matrix of its bit weight.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.size == 0:
        raise ValueError("empty coefficient list")
    nz = np.nonzero(c)[0]
    d = int(nz[-1]) if nz.size else 0
    c = c[: d + 1]
    w = np.asarray(weights, dtype=float)
    n = len(w)
    binom = np.array([[comb(m, j) for m in range(d + 1)] for j in range(d + 1)], dtype=float)

    def transfer(t: float) -> np.ndarray:
        # T[j, m] = C(m, j) t**(m - j) for j <= m
        p = np.array([[t ** (m - j) if m >= j else 0.0 for m in range(d + 1)] for j in range(d + 1)])
        return binom * p

    start = np.array([offset**j for j in range(d + 1)], dtype=np.complex128)
    ts = []
    for k in range(n):
        T = np.stack([transfer(w[k] * s) for s in range(2)], axis=1).astype(np.complex128)  # j, s, m
        if k == 0:
            T = np.tensordot(start, T, axes=(0, 0))[None]
        if k == n - 1:
            T = np.tensordot(T, c, axes=(2, 0))[..., None]
        ts.append(T)
    return MPS(ts)


def mps_abs(interval: Interval) -> MPS:
    """``|x| = x (Theta(x) - Theta(-x))`` built from exact factories."""
    from ..blas import hadamard

    x = mps_interval(interval)
    step = join_mps([1.0, -1.0], [mps_heaviside(interval, 0.0, 1), mps_heaviside(interval, 0.0, -1)])
    return hadamard(x, step)
