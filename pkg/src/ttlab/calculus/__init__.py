"""Differentiation operators, quadrature weights and grid refinement."""

from .derivatives import (
    Boundary,
    MomentumGrid,
    fd_stencil,
    finite_differences_mpo,
    fourier_derivative_mpo,
    mpo_weighted_shifts,
)
from .integration import (
    QuadratureRule,
    Rule,
    clenshaw_curtis_weights,
    fejer_weights,
    integrate_mps,
    quadrature_mps,
)
from .interpolation import fd_interpolation, fd_midpoint_operator, fourier_interpolation
