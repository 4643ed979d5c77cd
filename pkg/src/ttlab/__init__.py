"""ttlab: finite-precision linear algebra on tensor trains (MPS/MPO)."""

from .core import (
    DEFAULT_STRATEGY,
    NO_TRUNCATION,
    CanonicalMPS,
    CapacityError,
    Method,
    MPO,
    MPOList,
    MPOSum,
    MPS,
    MPSSum,
    NumericalError,
    ShapeError,
    Strategy,
    TTError,
    canonicalize,
    mpo_identity,
    mpo_to_dense,
    mps_from_dense,
    mps_to_dense,
    norm,
    random_uniform_mps,
    schmidt_split,
)
from .blas import (
    apply,
    combine,
    expectation_local,
    expectation_mpo,
    hadamard,
    mpo_from_diagonal_mps,
    mps_tensor_product,
    mps_tensor_sum,
    scprod,
    simplify,
    simplify_mpo,
)
from .kernels import BACKEND

__version__ = "0.1.0"
