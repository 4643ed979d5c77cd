"""Runge-Kutta and Crank-Nicolson steppers for ``dv/dt = -Hbar v``."""

from __future__ import annotations

import enum

import numpy as np

from ..blas import apply, combine
from ..core import MPOSum, MPS, NumericalError, mpo_identity
from ..lapack.solve import BICGSTAB, CGS, cg_solve
from .spec import EvolutionSpec, Mode, finish_step, generator


class Method(enum.Enum):
    EULER = "euler"
    EULER2 = "euler2"
    RK4 = "rk4"


def explicit_step(method, H, v: MPS, spec: EvolutionSpec) -> MPS:
    """One step of size ``spec.dt``; every linear combination is simplified.

    EULER: ``v - dt k1``.  EULER2 (Heun): ``v - dt/2 (k1 + k2)`` with
    ``k2 = Hbar (v - dt k1)``.  RK4: the classical four-stage scheme.
    """
    method = Method(method.lower()) if isinstance(method, str) else Method(method)
    dt, st = spec.dt, spec.strategy
    k1 = generator(H, v, spec)
    if method is Method.EULER:
        out = combine([1.0, -dt], [v, k1], st)
    elif method is Method.EULER2:
        v1 = combine([1.0, -dt], [v, k1], st)
        k2 = generator(H, v1, spec)
        out = combine([1.0, -dt / 2, -dt / 2], [v, k1, k2], st)
    else:
        k2 = generator(H, combine([1.0, -dt / 2], [v, k1], st), spec)
        k3 = generator(H, combine([1.0, -dt / 2], [v, k2], st), spec)
        k4 = generator(H, combine([1.0, -dt], [v, k3], st), spec)
        out = combine([1.0, -dt / 6, -dt / 3, -dt / 3, -dt / 6], [v, k1, k2, k3, k4], st)
    return finish_step(out, spec)


# Runge-Kutta-Fehlberg 4(5) tableau
_RKF_A = [
    [],
    [1 / 4],
    [3 / 32, 9 / 32],
    [1932 / 2197, -7200 / 2197, 7296 / 2197],
    [439 / 216, -8, 3680 / 513, -845 / 4104],
    [-8 / 27, 2, -3544 / 2565, 1859 / 4104, -11 / 40],
]
_RKF_B5 = np.array([16 / 135, 0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
_RKF_B4 = np.array([25 / 216, 0, 1408 / 2565, 2197 / 4104, -1 / 5, 0])


def _rkf_stages(H, v, dt, spec):
    ks = []
    for row in _RKF_A:
        if row:
            y = combine([1.0] + [-dt * a for a in row], [v] + ks[: len(row)], spec.strategy)
        else:
            y = v
        ks.append(generator(H, y, spec))
    return ks


def rkf_evolve(
    H,
    v: MPS,
    spec: EvolutionSpec,
    tol_step: float = 1e-8,
    dt0: float | None = None,
    dt_min: float = 1e-8,
    dt_max: float | None = None,
):
    """Adaptive RKF45 integration from 0 to ``spec.t_final``.

    The step error is the norm of the difference between the embedded
    fourth- and fifth-order updates; the fifth-order update is kept.  After
    each trial ``dt <- dt * clip(0.9 (tol/err)**(1/5), 0.2, 5)``.  Steps at
    ``dt_min`` are accepted regardless.  Returns ``(state, accepted, rejected)``.
    """
    t, T = 0.0, spec.t_final
    dt = spec.dt if dt0 is None else dt0
    dt_max = T if dt_max is None else dt_max
    dt = min(dt, dt_max)
    accepted = rejected = 0
    while t < T * (1 - 1e-14):
        h = min(dt, T - t)
        ks = _rkf_stages(H, v, h, spec)
        delta = combine(list(-h * (_RKF_B5 - _RKF_B4)), ks, spec.strategy)
        err = delta.norm()
        if not np.isfinite(err):
            raise NumericalError("non-finite RKF error estimate")
        if err <= tol_step or h <= dt_min:
            v = finish_step(combine([1.0] + list(-h * _RKF_B5), [v] + ks, spec.strategy), spec)
            t += h
            accepted += 1
            if spec.callback is not None:
                spec.callback(t, v, None)
        else:
            rejected += 1
        factor = 5.0 if err == 0 else min(max(0.9 * (tol_step / err) ** 0.2, 0.2), 5.0)
        dt = min(max(h * factor, dt_min), dt_max)
    return v, accepted, rejected


def crank_nicolson_step(H, v: MPS, spec: EvolutionSpec, solver_tol: float = 1e-12, maxiter: int = 100) -> MPS:
    """Trapezoidal step ``(I + dt/2 Hbar) v' = (I - dt/2 Hbar) v``.

    REAL mode solves the non-hermitian system with BiCGSTAB, IMAGINARY mode
    with conjugate gradients.
    """
    dims = H.dimensions()[1] if hasattr(H, "dimensions") else H.mpos[0].dimensions()[1]
    eye = mpo_identity(len(dims), dims)
    half = 0.5 * spec.dt * spec.factor
    left = MPOSum([1.0, half], [eye, H])
    right = MPOSum([1.0, -half], [eye, H])
    b = apply(right, v, spec.strategy)
    variant = BICGSTAB if spec.mode is Mode.REAL else CGS
    x, _, _ = cg_solve(left, b, v, spec.strategy, maxiter=maxiter, tol=solver_tol, variant=variant)
    return finish_step(x, spec)
