"""Real- and imaginary-time evolution of MPS."""

from .explicit import Method, crank_nicolson_step, explicit_step, rkf_evolve
from .spec import EvolutionSpec, Mode, energy, evolve
from .tdvp import krylov_expm, tdvp_step
from .trotter import RUTH_C, RUTH_D, trotter_step
