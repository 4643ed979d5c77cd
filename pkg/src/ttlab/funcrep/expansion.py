"""Orthogonal-polynomial expansions evaluated on MPS/MPO by Clenshaw's recurrence.

Each basis satisfies ``P_{k+1} = (alpha_k x + beta_k) P_k - gamma_k P_{k-1}``
with ``P_0 = 1``.  Clenshaw's backward recurrence

    b_k = c_k + (alpha_k x + beta_k) b_{k+1} - gamma_{k+1} b_{k+2}

returns ``f(x) = b_0``.
"""

from __future__ import annotations

import enum
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import legendre as npleg

from ..blas import combine, hadamard, simplify_mpo
from ..core import DEFAULT_STRATEGY, MPO, MPOSum, MPS, Strategy, mpo_identity, mpo_product


class OrthogonalBasis(enum.Enum):
    CHEBYSHEV = "chebyshev"
    LEGENDRE = "legendre"
    MONOMIAL = "monomial"

    def alpha(self, k: int) -> float:
        if self is OrthogonalBasis.CHEBYSHEV:
            return 1.0 if k == 0 else 2.0
        if self is OrthogonalBasis.LEGENDRE:
            return (2 * k + 1) / (k + 1)
        return 1.0

    def beta(self, k: int) -> float:
        return 0.0

    def gamma(self, k: int) -> float:
        if k < 1:
            return 0.0
        if self is OrthogonalBasis.CHEBYSHEV:
            return 1.0
        if self is OrthogonalBasis.LEGENDRE:
            return k / (k + 1)
        return 0.0

    def evaluate(self, coeffs: Sequence[complex], x) -> np.ndarray:
        """Scalar Clenshaw evaluation (reference for the tensor version)."""
        x = np.asarray(x)
        b1 = np.zeros_like(x, dtype=complex)
        b2 = np.zeros_like(x, dtype=complex)
        for k in range(len(coeffs) - 1, -1, -1):
            b1, b2 = coeffs[k] + (self.alpha(k) * x + self.beta(k)) * b1 - self.gamma(k + 1) * b2, b1
        return b1


def _lobatto_coefficients(values: np.ndarray) -> np.ndarray:
    """Interpolating Chebyshev coefficients from samples at cos(j pi / M)."""
    M = len(values) - 1
    if M == 0:
        return values.astype(complex)
    j = np.arange(M + 1)
    w = np.ones(M + 1)
    w[0] = w[-1] = 0.5
    C = np.cos(np.outer(j, j) * np.pi / M)  # C[k, j] = T_k(x_j)
    c = (2.0 / M) * C @ (w * values)
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def project_coefficients(
    f: Callable[[np.ndarray], np.ndarray],
    basis: OrthogonalBasis = OrthogonalBasis.CHEBYSHEV,
    order: int = 20,
    domain: tuple[float, float] = (-1.0, 1.0),
) -> np.ndarray:
    """Expansion coefficients ``c_0..c_order`` of ``f`` on ``domain``.

    Chebyshev: interpolation at the ``order + 1`` Lobatto nodes.
    Legendre: Gauss-Legendre quadrature with ``order + 1`` nodes.
    Monomial: Chebyshev interpolant converted to powers of the scaled variable.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    a, b = domain
    to_domain = lambda t: 0.5 * (a + b) + 0.5 * (b - a) * t  # noqa: E731
    if basis is OrthogonalBasis.LEGENDRE:
        t, w = npleg.leggauss(order + 1)
        fx = np.asarray(f(to_domain(t)))
        P = npleg.legvander(t, order)  # P[j, k] = P_k(t_j)
        return (2 * np.arange(order + 1) + 1) / 2 * (P.T @ (w * fx))
    M = max(order, 1)
    t = np.cos(np.arange(M + 1) * np.pi / M)
    c = _lobatto_coefficients(np.asarray(f(to_domain(t))))
    c = c[: order + 1]
    if basis is OrthogonalBasis.MONOMIAL:
        return npcheb.cheb2poly(c)
    return c


def _rescale_mps(arg: MPS, domain, strategy) -> tuple[MPS, MPS]:
    a, b = domain
    ones = MPS([np.ones((1, d, 1)) for d in arg.physical_dimensions()])
    x = combine([2.0 / (b - a), -(a + b) / (b - a)], [arg, ones], strategy)
    return x, ones


def expansion_apply(
    coeffs: Sequence[complex],
    basis: OrthogonalBasis,
    argument,
    domain: tuple[float, float] = (-1.0, 1.0),
    strategy: Strategy = DEFAULT_STRATEGY,
):
    """Evaluate ``sum_k c_k P_k(x)`` with ``x`` an MPS (element-wise) or an MPO.

    The argument is rescaled from ``domain`` to ``[-1, 1]`` for every basis,
    matching the variable used by :func:`project_coefficients`.  Every
    recurrence step is simplified with ``strategy``.
    """
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("empty coefficient list")
    if isinstance(argument, MPS):
        return _clenshaw_mps(coeffs, basis, argument, domain, strategy)
    if isinstance(argument, MPO):
        return _clenshaw_mpo(coeffs, basis, argument, domain, strategy)
    raise TypeError("argument must be an MPS or MPO")


def _clenshaw_mps(coeffs, basis, arg, domain, strategy):
    x, ones = _rescale_mps(arg, domain, strategy)
    K = len(coeffs) - 1
    b1 = combine([coeffs[K]], [ones], strategy)
    b2 = None
    for k in range(K - 1, -1, -1):
        xb = hadamard(x, b1)
        w = [coeffs[k], basis.alpha(k)]
        s = [ones, xb]
        if basis.beta(k):
            w.append(basis.beta(k))
            s.append(b1)
        if b2 is not None and basis.gamma(k + 1):
            w.append(-basis.gamma(k + 1))
            s.append(b2)
        b1, b2 = combine(w, s, strategy), b1
    return b1


def _clenshaw_mpo(coeffs, basis, arg, domain, strategy):
    a, b = domain
    dims = arg.dimensions()[0]
    eye = mpo_identity(len(dims), dims)
    op_strategy = strategy.replace(tolerance=min(strategy.tolerance, 1e-14))
    x = simplify_mpo(MPOSum([2.0 / (b - a), -(a + b) / (b - a)], [arg, eye]), op_strategy)
    K = len(coeffs) - 1
    b1 = simplify_mpo(MPOSum([coeffs[K]], [eye]), op_strategy)
    b2 = None
    for k in range(K - 1, -1, -1):
        w = [coeffs[k], basis.alpha(k)]
        s = [eye, mpo_product(x, b1)]
        if basis.beta(k):
            w.append(basis.beta(k))
            s.append(b1)
        if b2 is not None and basis.gamma(k + 1):
            w.append(-basis.gamma(k + 1))
            s.append(b2)
        b1, b2 = simplify_mpo(MPOSum(w, s), op_strategy), b1
    return b1
