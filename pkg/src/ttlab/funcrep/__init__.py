"""Quantized function encodings: meshes, closed-form factories, expansions and cross interpolation."""

from .cross import BlackBox, CrossReport, cross_interpolation, maxvol, maxvol_rectangular, maxvol_square, mps_evaluate
from .expansion import OrthogonalBasis, expansion_apply, project_coefficients
from .factories import (
    Kind,
    affine_polynomial_mps,
    mps_abs,
    mps_constant,
    mps_cos,
    mps_elementary,
    mps_exp_sum,
    mps_exponential,
    mps_from_polynomial,
    mps_heaviside,
    mps_interval,
    mps_sin,
)
from .mesh import IndexMap, Interval, IntervalKind, Mesh, RegularInterval, mps_to_mesh_map
