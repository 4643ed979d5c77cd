from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..blas import distance, apply
from ..core import NO_TRUNCATION, MPS


@dataclass
class SolveReport:
    """Outcome of an iterative solver.

    ``value`` holds the eigenvalue (eigensolvers) and ``residual`` the
    residual norm; ``trace`` records ``(iteration, residual or energy)``.
    """

    value: float = float("nan")
    residual: float = float("nan")
    iterations: int = 0
    converged: bool = False
    trace: list = field(default_factory=list)
    matvecs: int = 0
    warnings: list = field(default_factory=list)


def residual_norm(A, x: MPS, b: MPS) -> float:
    """``||b - A x||`` evaluated exactly (no truncation, no squared cancellation)."""
    Ax = apply(A, x, NO_TRUNCATION, simplify_result=False)
    return distance(b, Ax)


def check_hermitian_energy(E: complex, report: SolveReport) -> float:
    if abs(np.imag(E)) > 1e-8 * max(abs(E), 1e-300):
        report.warnings.append(f"non-hermitian operator: Im<H> = {np.imag(E):.3e}")
    return float(np.real(E))


__all__ = ["SolveReport", "residual_norm", "check_hermitian_energy"]
