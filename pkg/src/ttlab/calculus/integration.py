"""Quadrature rules as weight MPS; integrals are scalar products with the samples."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..blas import mps_tensor_product, scprod
from ..core import MPS, Method, Strategy, basis_state, canonicalize, join_mps, ones_mps
from ..funcrep.cross import BlackBox, cross_interpolation
from ..funcrep.mesh import Interval, IntervalKind

# Gregory end corrections to the trapezoidal weights (units of h), through third differences
GREGORY_END = np.array([-109.0, 177.0, -87.0, 19.0]) / 720.0

_COMPRESS = Strategy(method=Method.SVD_TRUNCATE, tolerance=1e-15)


class Rule(enum.Enum):
    TRAPEZOIDAL = "trapezoidal"
    SIMPSON38 = "simpson38"
    FIFTH_ORDER = "fifth_order"
    CLENSHAW_CURTIS = "clenshaw_curtis"
    FEJER = "fejer"


@dataclass
class QuadratureRule:
    name: Rule
    weights: MPS
    interval: Interval
    warnings: list = field(default_factory=list)

    def dense(self) -> np.ndarray:
        return self.weights.to_vector()


def _sparse_plus(base: MPS, corrections: dict[int, float], n: int) -> MPS:
    """``base + sum_i c_i e_i``, recompressed."""
    states = [base] + [basis_state(i, [2] * n) for i in corrections]
    weights = [1.0] + list(corrections.values())
    joined = join_mps(weights, states)
    return canonicalize(joined, 0, _COMPRESS).with_error(0.0)


def _mod3_indicator(n: int) -> MPS:
    """``[i mod 3 == 0]`` by reading bits from the most significant one."""
    ts = []
    for k in range(n):
        T = np.zeros((3, 2, 3), dtype=np.complex128)
        for r in range(3):
            for s in range(2):
                T[r, s, (2 * r + s) % 3] = 1.0
        ts.append(T)
    ts[0] = ts[0][:1]
    ts[-1] = ts[-1] @ np.array([1.0, 0.0, 0.0]).reshape(3, 1)
    return MPS(ts)


def _closed_step(interval: Interval) -> float:
    if interval.kind is not IntervalKind.REGULAR_CLOSED:
        raise ValueError("Newton-Cotes rules need a REGULAR_CLOSED interval")
    return interval.step


def _trapezoidal(interval: Interval) -> tuple[MPS, list]:
    n, N = interval.n_qubits, interval.size
    if interval.kind is IntervalKind.REGULAR_HALF_OPEN:
        # periodic rule on [a, b): every sample has weight h
        return ones_mps([2] * n) * interval.step, []
    h = _closed_step(interval)
    base = ones_mps([2] * n) * h
    return _sparse_plus(base, {0: -h / 2, N - 1: -h / 2}, n), []


def _simpson38(interval: Interval) -> tuple[MPS, list]:
    n, N = interval.n_qubits, interval.size
    h = _closed_step(interval)
    if N < 4:
        raise ValueError("Simpson 3/8 needs at least 4 points")
    c = 3 * h / 8
    # interior pattern 3, 3, 2 repeating: 3 - [i mod 3 == 0]
    base = join_mps([3 * c, -c], [ones_mps([2] * n), _mod3_indicator(n)])
    warnings = []
    if (N - 1) % 3 == 0:
        corr = {0: -c, N - 1: -c}  # ends carry 1 instead of 2
    else:
        # 3/8 panels on [0, N-2], then one trapezoidal panel
        corr = {0: -c, N - 2: -c + h / 2, N - 1: -3 * c + h / 2}
        warnings.append("2**n - 1 intervals not divisible by 3: last panel uses the trapezoidal rule")
    return _sparse_plus(base, corr, n), warnings


def _fifth_order(interval: Interval) -> tuple[MPS, list]:
    n, N = interval.n_qubits, interval.size
    h = _closed_step(interval)
    if n < 3:
        raise ValueError("the fifth-order rule needs n >= 3")
    corr = {0: -h / 2, N - 1: -h / 2}
    for k, g in enumerate(GREGORY_END):
        corr[k] = corr.get(k, 0.0) + h * g
        corr[N - 1 - k] = corr.get(N - 1 - k, 0.0) + h * g
    return _sparse_plus(ones_mps([2] * n) * h, corr, n), []


def clenshaw_curtis_weights(indices: np.ndarray, N: int) -> np.ndarray:
    """Clenshaw-Curtis weights on ``[-1, 1]`` at Lobatto nodes ``cos(j pi / (N-1))``."""
    M = N - 1
    j = np.asarray(indices, dtype=float)
    k = np.arange(1, M // 2 + 1)
    b = np.where(2 * k == M, 1.0, 2.0)
    s = np.cos(2 * np.pi * np.outer(j, k) / M) @ (b / (4 * k**2 - 1))
    c = np.where((j == 0) | (j == M), 1.0, 2.0)
    return c / M * (1 - s)


def fejer_weights(indices: np.ndarray, N: int) -> np.ndarray:
    """Fejer first-rule weights on ``[-1, 1]`` at nodes ``cos((2j + 1) pi / (2N))``."""
    theta = (2 * np.asarray(indices, dtype=float) + 1) * np.pi / (2 * N)
    k = np.arange(1, N // 2 + 1)
    s = np.cos(2 * np.outer(theta, k)) @ (1.0 / (4 * k**2 - 1))
    return 2.0 / N * (1 - 2 * s)


def _cross_loaded(interval: Interval, weights_fn, kind: IntervalKind) -> tuple[MPS, list]:
    if interval.kind is not kind:
        raise ValueError(f"this rule needs a {kind.value} interval")
    n, N = interval.n_qubits, interval.size
    scale = 0.5 * interval.length
    if n == 1:
        w = scale * weights_fn(np.arange(2), N)
        return MPS([w.reshape(1, 2, 1).astype(np.complex128)]), []
    powers = 2 ** np.arange(n - 1, -1, -1)
    bb = BlackBox(lambda bits: scale * weights_fn(bits @ powers, N), [2] * n)
    state, report = cross_interpolation(bb, "DMRG", Strategy(method=Method.SVD_TRUNCATE, tolerance=1e-14),
                                        tol=1e-13, max_sweeps=8)
    warnings = [] if report.converged else [f"cross interpolation stopped at error {report.validation_error:.2e}"]
    return state, warnings


def quadrature_mps(rule, interval: Interval) -> QuadratureRule:
    """Weight MPS ``w`` such that ``integral f ~ <w, f>`` on ``interval``.

    TRAPEZOIDAL, SIMPSON38 and FIFTH_ORDER need a regular grid (a half-open
    grid gets the periodic trapezoidal rule).  CLENSHAW_CURTIS needs a
    CHEBYSHEV_LOBATTO grid and FEJER a CHEBYSHEV_GAUSS grid.
    """
    rule = Rule(rule.lower()) if isinstance(rule, str) else Rule(rule)
    if rule is Rule.TRAPEZOIDAL:
        w, warn = _trapezoidal(interval)
    elif rule is Rule.SIMPSON38:
        w, warn = _simpson38(interval)
    elif rule is Rule.FIFTH_ORDER:
        w, warn = _fifth_order(interval)
    elif rule is Rule.CLENSHAW_CURTIS:
        w, warn = _cross_loaded(interval, clenshaw_curtis_weights, IntervalKind.CHEBYSHEV_LOBATTO)
    else:
        w, warn = _cross_loaded(interval, fejer_weights, IntervalKind.CHEBYSHEV_GAUSS)
    return QuadratureRule(rule, w, interval, warn)


def integrate_mps(v: MPS, rules: Sequence[QuadratureRule] | QuadratureRule, order: str = "A") -> complex:
    """``<w, v>`` with ``w`` the tensor product of the per-dimension weights."""
    if isinstance(rules, QuadratureRule):
        rules = [rules]
    rules = list(rules)
    if len(rules) == 1:
        w = rules[0].weights
    else:
        w = mps_tensor_product([r.weights for r in rules], order)
    return complex(scprod(w.conj(), v))
