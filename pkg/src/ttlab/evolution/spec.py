"""Shared evolution settings."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from ..blas import apply, expectation_mpo, scprod
from ..core import DEFAULT_STRATEGY, MPS, CanonicalMPS, Strategy, canonicalize


class Mode(enum.Enum):
    """REAL integrates ``dv/dt = -i H v``; IMAGINARY integrates ``dv/dt = -H v``."""

    REAL = "real"
    IMAGINARY = "imaginary"


@dataclass(frozen=True)
class EvolutionSpec:
    mode: Mode = Mode.REAL
    dt: float = 0.01
    t_final: float = 1.0
    strategy: Strategy = DEFAULT_STRATEGY
    normalize: bool = False
    callback: Callable | None = None

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode.lower()))
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.t_final < 0:
            raise ValueError("t_final must be >= 0")

    @property
    def factor(self) -> complex:
        """``c`` in ``Hbar = c H``."""
        return 1j if self.mode is Mode.REAL else 1.0

    @property
    def steps(self) -> int:
        return int(round(self.t_final / self.dt))


def generator(H, v: MPS, spec: EvolutionSpec) -> MPS:
    """``Hbar v``."""
    return apply(H, v, spec.strategy) * spec.factor


def energy(H, v: MPS) -> float:
    return float((expectation_mpo(H, v) / scprod(v, v)).real)


def finish_step(v: MPS, spec: EvolutionSpec) -> MPS:
    if spec.normalize and spec.mode is Mode.IMAGINARY:
        c = v if isinstance(v, CanonicalMPS) else canonicalize(v, 0)
        return c * (1.0 / c.norm())
    return v


def evolve(step: Callable, H, v: MPS, spec: EvolutionSpec, observable=None, **kwargs) -> MPS:
    """Repeat ``step(H, v, spec, **kwargs)`` up to ``spec.t_final``.

    The callback, if any, receives ``(t, state, energy)`` after each step,
    with the energy measured on ``observable`` (default ``H``).
    """
    observable = H if observable is None else observable
    for k in range(spec.steps):
        v = step(H, v, spec, **kwargs)
        if spec.callback is not None:
            spec.callback((k + 1) * spec.dt, v, energy(observable, v))
    return v
