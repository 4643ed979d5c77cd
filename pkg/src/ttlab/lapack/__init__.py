"""Eigenvalue searches, linear solvers and Fourier transforms on MPS."""

from .eigen import KrylovBasis, arnoldi_eigh, dmrg_min_eigen, gradient_descent, power_method
from .qft import iqft, iqft_mpo, qft, qft_flip, qft_mpo
from .report import SolveReport, residual_norm
from .solve import BICGSTAB, CGS, cg_solve, dmrg_solve, gmres_solve
