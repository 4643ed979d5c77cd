"""Tensor-train containers, canonical forms and truncated splits.

Conventions
-----------
* MPS tensors have legs ``(left bond, physical, right bond)``.
* MPO tensors have legs ``(left bond, out, in, right bond)``.
* Site 0 holds the most significant index of the vector.
* ``error`` is an upper bound on the L2 distance to the exact vector that
  the approximate operations were meant to produce.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace as _dc_replace
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from . import kernels

DENSE_GUARD = 2**26
MPO_DENSE_GUARD = 2**13


class TTError(Exception):
    """Base class for library errors."""


class ShapeError(TTError, ValueError):
    """Dimension or bond mismatch."""


class CapacityError(TTError):
    """Dense conversion would exceed the configured guard."""


class NumericalError(TTError, ArithmeticError):
    """A numerical kernel failed (e.g. SVD did not converge)."""


class Method(enum.Enum):
    SVD_TRUNCATE = "svd"
    VARIATIONAL = "variational"


@dataclass(frozen=True)
class Strategy:
    """Truncation and simplification policy.

    ``tolerance`` is a relative singular-value cutoff: values at or below
    ``tolerance * sigma_max`` are dropped.  ``simplification_tolerance`` is
    measured in squared-norm units, ``||psi - phi||^2 / ||phi||^2``, and stops
    variational sweeps.
    """

    method: Method = Method.VARIATIONAL
    tolerance: float = 1e-12
    simplification_tolerance: float = 1e-12
    max_bond: int | None = None
    max_sweeps: int = 4
    normalize: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0):
            raise ValueError("tolerance must be finite and >= 0")
        if not (
            math.isfinite(self.simplification_tolerance)
            and self.simplification_tolerance >= 0
        ):
            raise ValueError("simplification_tolerance must be finite and >= 0")
        if self.max_bond is not None and self.max_bond < 1:
            raise ValueError("max_bond must be positive or None")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if isinstance(self.method, str):
            object.__setattr__(self, "method", Method(self.method))

    def replace(self, **changes) -> "Strategy":
        return _dc_replace(self, **changes)


DEFAULT_STRATEGY = Strategy()
NO_TRUNCATION = Strategy(method=Method.SVD_TRUNCATE, tolerance=0.0)


def _as_tensor(t, rank: int) -> np.ndarray:
    a = np.asarray(t, dtype=np.complex128)
    if a.ndim != rank:
        raise ShapeError(f"expected a rank-{rank} tensor, got shape {a.shape}")
    if min(a.shape) < 1:
        raise ShapeError(f"all tensor dimensions must be >= 1, got {a.shape}")
    return a


def _check_chain(tensors: Sequence[np.ndarray]) -> None:
    if not tensors:
        raise ShapeError("a tensor train needs at least one tensor")
    if tensors[0].shape[0] != 1 or tensors[-1].shape[-1] != 1:
        raise ShapeError("boundary bonds must have dimension 1")
    for k in range(len(tensors) - 1):
        if tensors[k].shape[-1] != tensors[k + 1].shape[0]:
            raise ShapeError(
                f"bond mismatch between sites {k} and {k + 1}: "
                f"{tensors[k].shape[-1]} != {tensors[k + 1].shape[0]}"
            )


class MPS:
    """Vector stored as a chain of rank-3 tensors plus an error bound."""

    __array_priority__ = 100

    def __init__(self, tensors: Iterable, error: float = 0.0):
        ts = [_as_tensor(t, 3) for t in tensors]
        _check_chain(ts)
        if not (error >= 0 and math.isfinite(error)):
            raise ValueError("error must be finite and non-negative")
        self._tensors = ts
        self._error = float(error)

    # container protocol
    def __len__(self) -> int:
        return len(self._tensors)

    def __getitem__(self, k):
        return self._tensors[k]

    def __iter__(self):
        return iter(self._tensors)

    @property
    def tensors(self) -> list[np.ndarray]:
        return list(self._tensors)

    @property
    def error(self) -> float:
        return self._error

    @property
    def size(self) -> int:
        return len(self._tensors)

    def physical_dimensions(self) -> list[int]:
        return [t.shape[1] for t in self._tensors]

    def bond_dimensions(self) -> list[int]:
        """Interior bonds, left to right."""
        return [t.shape[2] for t in self._tensors[:-1]]

    def max_bond_dimension(self) -> int:
        return max([1] + self.bond_dimensions())

    def dimension(self) -> int:
        return math.prod(self.physical_dimensions())

    def with_error(self, error: float) -> "MPS":
        return MPS(self._tensors, error)

    def to_vector(self) -> np.ndarray:
        return mps_to_dense(self)

    def norm(self) -> float:
        return norm(self)

    def conj(self) -> "MPS":
        return MPS([t.conj() for t in self._tensors], self._error)

    def __mul__(self, c) -> "MPS":
        if isinstance(c, MPS):
            from .blas import hadamard

            return hadamard(self, c)
        if not np.isscalar(c):
            return NotImplemented
        c = complex(c)
        L = len(self._tensors)
        if c == 0:
            ts = [t * 0 for t in self._tensors]
        else:
            # spread |c| over every tensor, keep the phase on the first one
            f = abs(c) ** (1.0 / L)
            ts = [t * f for t in self._tensors]
            ts[0] = ts[0] * (c / abs(c))
        return MPS(ts, abs(c) * self._error)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "MPS":
        return self * (1.0 / complex(c))

    def __neg__(self) -> "MPS":
        return self * -1.0

    def __add__(self, other):
        return MPSSum([1.0], [self]) + other

    def __sub__(self, other):
        return MPSSum([1.0], [self]) - other

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(sites={len(self)}, "
            f"bonds={self.bond_dimensions()}, error={self._error:.3g})"
        )


class CanonicalMPS(MPS):
    """MPS with isometric tensors left and right of ``center``."""

    def __init__(self, tensors: Iterable, center: int = 0, error: float = 0.0):
        super().__init__(tensors, error)
        L = len(self._tensors)
        if not 0 <= center < L:
            raise ValueError(f"center {center} outside [0, {L})")
        self.center = int(center)

    def with_error(self, error: float) -> "CanonicalMPS":
        return CanonicalMPS(self._tensors, self.center, error)

    def norm(self) -> float:
        return float(np.linalg.norm(self._tensors[self.center]))

    def __mul__(self, c):
        if isinstance(c, MPS) or not np.isscalar(c):
            return MPS.__mul__(self, c)
        c = complex(c)
        ts = list(self._tensors)
        ts[self.center] = ts[self.center] * c
        return CanonicalMPS(ts, self.center, abs(c) * self._error)

    __rmul__ = __mul__

    def normalized(self) -> "CanonicalMPS":
        n = self.norm()
        if n == 0:
            return self
        return self * (1.0 / n)

    def __repr__(self) -> str:
        return MPS.__repr__(self)[:-1] + f", center={self.center})"


class MPSSum:
    """Lazy weighted sum of MPS with matching physical dimensions."""

    def __init__(self, weights: Sequence, states: Sequence[MPS]):
        weights = [complex(w) for w in weights]
        states = list(states)
        if len(weights) != len(states) or not states:
            raise ShapeError("MPSSum needs equally many (>= 1) weights and states")
        flat_w: list[complex] = []
        flat_s: list[MPS] = []
        for w, s in zip(weights, states):
            if isinstance(s, MPSSum):
                flat_w.extend(w * x for x in s.weights)
                flat_s.extend(s.states)
            elif isinstance(s, MPS):
                flat_w.append(w)
                flat_s.append(s)
            else:
                raise TypeError(f"cannot add {type(s).__name__} to an MPSSum")
        dims = flat_s[0].physical_dimensions()
        for s in flat_s[1:]:
            if s.physical_dimensions() != dims:
                raise ShapeError("MPSSum terms have different physical dimensions")
        self.weights = flat_w
        self.states = flat_s

    @property
    def error(self) -> float:
        return float(sum(abs(w) * s.error for w, s in zip(self.weights, self.states)))

    def physical_dimensions(self) -> list[int]:
        return self.states[0].physical_dimensions()

    def __len__(self) -> int:
        return len(self.states[0])

    def __add__(self, other):
        if isinstance(other, (MPS, MPSSum)):
            return MPSSum(self.weights + [1.0], self.states + [other])
        return NotImplemented

    def __radd__(self, other):
        if isinstance(other, MPS):
            return MPSSum([1.0] + self.weights, [other] + self.states)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, (MPS, MPSSum)):
            return MPSSum(self.weights + [-1.0], self.states + [other])
        return NotImplemented

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return MPSSum([complex(c) * w for w in self.weights], self.states)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def join(self) -> MPS:
        """Exact block-diagonal concatenation into a single MPS."""
        return join_mps(self.weights, self.states)

    def to_vector(self) -> np.ndarray:
        return sum(w * mps_to_dense(s) for w, s in zip(self.weights, self.states))


def join_mps(weights: Sequence, states: Sequence[MPS]) -> MPS:
    L = len(states[0])
    weights = [complex(w) for w in weights]
    error = float(sum(abs(w) * s.error for w, s in zip(weights, states)))
    if len(states) == 1:
        return MPS((states[0] * weights[0]).tensors, error)
    if L == 1:
        t = sum(w * s[0] for w, s in zip(weights, states))
        return MPS([t], error)
    out = []
    for n in range(L):
        d = states[0][n].shape[1]
        if n == 0:
            t = np.concatenate([w * s[0] for w, s in zip(weights, states)], axis=2)
        elif n == L - 1:
            t = np.concatenate([s[n] for s in states], axis=0)
        else:
            lefts = [s[n].shape[0] for s in states]
            rights = [s[n].shape[2] for s in states]
            t = np.zeros((sum(lefts), d, sum(rights)), dtype=np.complex128)
            a = b = 0
            for s, l, r in zip(states, lefts, rights):
                t[a : a + l, :, b : b + r] = s[n]
                a += l
                b += r
        out.append(t)
    return MPS(out, error)


# --------------------------------------------------------------------------
# operators


class MPO:
    """Linear operator stored as a chain of rank-4 tensors."""

    __array_priority__ = 100

    def __init__(self, tensors: Iterable):
        ts = [_as_tensor(t, 4) for t in tensors]
        _check_chain(ts)
        self._tensors = ts

    def __len__(self) -> int:
        return len(self._tensors)

    def __getitem__(self, k):
        return self._tensors[k]

    def __iter__(self):
        return iter(self._tensors)

    @property
    def tensors(self) -> list[np.ndarray]:
        return list(self._tensors)

    @property
    def size(self) -> int:
        return len(self._tensors)

    def dimensions(self) -> tuple[list[int], list[int]]:
        """(output dims, input dims) per site."""
        return [t.shape[1] for t in self._tensors], [t.shape[2] for t in self._tensors]

    def bond_dimensions(self) -> list[int]:
        return [t.shape[3] for t in self._tensors[:-1]]

    def max_bond_dimension(self) -> int:
        return max([1] + self.bond_dimensions())

    def to_matrix(self) -> np.ndarray:
        return mpo_to_dense(self)

    def dagger(self) -> "MPO":
        return MPO([np.conj(t.transpose(0, 2, 1, 3)) for t in self._tensors])

    def norm_bound(self) -> float:
        """Upper bound on the spectral norm: product of unfolded tensor norms."""
        cached = getattr(self, "_norm_bound", None)
        if cached is not None:
            return cached
        bound = 1.0
        for t in self._tensors:
            b, o, i, b2 = t.shape
            m = t.reshape(b * o, i * b2)
            bound *= float(scipy.linalg.norm(m, 2))
        self._norm_bound = bound
        return bound

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        c = complex(c)
        L = len(self._tensors)
        if c == 0:
            return MPO([t * 0 for t in self._tensors])
        f = abs(c) ** (1.0 / L)
        ts = [t * f for t in self._tensors]
        ts[0] = ts[0] * (c / abs(c))
        return MPO(ts)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __add__(self, other):
        if isinstance(other, (MPO, MPOSum)):
            return MPOSum([1.0], [self]) + other
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, (MPO, MPOSum)):
            return MPOSum([1.0], [self]) - other
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, (MPS, MPSSum)):
            from .blas import apply

            return apply(self, other)
        if isinstance(other, MPO):
            return MPOList([other, self])
        if isinstance(other, MPOList):
            return MPOList(other.mpos + [self])
        return NotImplemented

    def __repr__(self) -> str:
        return f"MPO(sites={len(self)}, bonds={self.bond_dimensions()})"


class MPOSum:
    """Lazy weighted sum of MPOs."""

    def __init__(self, weights: Sequence, mpos: Sequence[MPO]):
        flat_w: list[complex] = []
        flat_m: list[MPO] = []
        for w, m in zip(weights, mpos):
            if isinstance(m, MPOSum):
                flat_w.extend(complex(w) * x for x in m.weights)
                flat_m.extend(m.mpos)
            else:
                flat_w.append(complex(w))
                flat_m.append(m)
        if not flat_m or len(flat_w) != len(flat_m):
            raise ShapeError("MPOSum needs equally many (>= 1) weights and operators")
        self.weights = flat_w
        self.mpos = flat_m

    def __len__(self) -> int:
        return len(self.mpos[0])

    def __add__(self, other):
        if isinstance(other, (MPO, MPOSum)):
            return MPOSum(self.weights + [1.0], self.mpos + [other])
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, (MPO, MPOSum)):
            return MPOSum(self.weights + [-1.0], self.mpos + [other])
        return NotImplemented

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return MPOSum([complex(c) * w for w in self.weights], self.mpos)

    __rmul__ = __mul__

    def join(self) -> MPO:
        states = [mpo_as_mps(m) for m in self.mpos]
        joined = join_mps(self.weights, states)
        return mps_as_mpo(joined, self.mpos[0].dimensions())

    def to_matrix(self) -> np.ndarray:
        return sum(w * mpo_to_dense(m) for w, m in zip(self.weights, self.mpos))

    def __matmul__(self, other):
        if isinstance(other, (MPS, MPSSum)):
            from .blas import apply

            return apply(self, other)
        return NotImplemented


class MPOList:
    """Product of MPO factors; ``mpos[0]`` acts first.

    As a matrix this is ``mpos[-1] @ ... @ mpos[0]``.
    """

    def __init__(self, mpos: Sequence[MPO]):
        mpos = list(mpos)
        if not mpos:
            raise ShapeError("MPOList needs at least one factor")
        for a, b in zip(mpos[:-1], mpos[1:]):
            if a.dimensions()[0] != b.dimensions()[1]:
                raise ShapeError("incompatible physical dimensions in MPOList")
        self.mpos = mpos

    def __len__(self) -> int:
        return len(self.mpos[0])

    def dimensions(self) -> tuple[list[int], list[int]]:
        return self.mpos[-1].dimensions()[0], self.mpos[0].dimensions()[1]

    def join(self) -> MPO:
        out = self.mpos[0]
        for m in self.mpos[1:]:
            out = mpo_product(m, out)
        return out

    def to_matrix(self) -> np.ndarray:
        M = mpo_to_dense(self.mpos[0])
        for m in self.mpos[1:]:
            M = mpo_to_dense(m) @ M
        return M

    def dagger(self) -> "MPOList":
        return MPOList([m.dagger() for m in reversed(self.mpos)])

    def __matmul__(self, other):
        if isinstance(other, (MPS, MPSSum)):
            from .blas import apply

            return apply(self, other)
        if isinstance(other, MPO):
            return MPOList([other] + self.mpos)
        if isinstance(other, MPOList):
            return MPOList(other.mpos + self.mpos)
        return NotImplemented


def mpo_product(a: MPO, b: MPO) -> MPO:
    """Exact product ``a @ b`` as one MPO (bond dimensions multiply)."""
    if len(a) != len(b):
        raise ShapeError("MPO lengths differ")
    out = []
    for A, B in zip(a, b):
        if A.shape[2] != B.shape[1]:
            raise ShapeError("inner physical dimensions differ")
        C = np.einsum("ajkb,ckid->acjibd", A, B)
        s = C.shape
        out.append(C.reshape(s[0] * s[1], s[2], s[3], s[4] * s[5]))
    return MPO(out)


def mpo_as_mps(op: MPO) -> MPS:
    """Flatten each (out, in) pair into one physical index of size d_out*d_in."""
    return MPS([t.reshape(t.shape[0], t.shape[1] * t.shape[2], t.shape[3]) for t in op])


def mps_as_mpo(state: MPS, dims: tuple[list[int], list[int]]) -> MPO:
    outs, ins = dims
    return MPO(
        [t.reshape(t.shape[0], o, i, t.shape[2]) for t, o, i in zip(state, outs, ins)]
    )


# --------------------------------------------------------------------------
# dense conversions


def mps_to_dense(m: MPS, guard: int = DENSE_GUARD) -> np.ndarray:
    if not isinstance(m, MPS):
        raise TypeError(f"mps_to_dense requires an MPS, got {type(m).__name__}")
    if m.dimension() > guard:
        raise CapacityError(f"dense size {m.dimension()} exceeds guard {guard}")
    v = m[0].reshape(m[0].shape[1], m[0].shape[2])
    for t in m.tensors[1:]:
        v = (v @ t.reshape(t.shape[0], -1)).reshape(-1, t.shape[2])
    return v.reshape(-1)


def mps_from_dense(
    v, dims: Sequence[int] | None = None, strategy: Strategy = NO_TRUNCATION
) -> CanonicalMPS:
    """Tensorize ``v`` (most significant index first) into a canonical MPS at site 0."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if dims is None:
        n = int(round(math.log2(v.size))) if v.size > 0 else 0
        if 2**n != v.size:
            raise ShapeError("vector length is not a power of two; pass dims")
        dims = [2] * max(n, 1)
    dims = [int(d) for d in dims]
    if math.prod(dims) != v.size:
        raise ShapeError(f"vector length {v.size} does not match dims {dims}")
    L = len(dims)
    tensors: list[np.ndarray] = [None] * L  # type: ignore[list-item]
    err2 = 0.0
    # right-to-left sweep: right isometries everywhere except site 0
    rest = v.reshape(-1, 1)
    right = 1
    for n in range(L - 1, 0, -1):
        rest = rest.reshape(-1, dims[n] * right)
        A, B, e = schmidt_split(rest, strategy, sweep="left")
        err2 += e * e
        tensors[n] = B.reshape(B.shape[0], dims[n], right)
        rest = A
        right = B.shape[0]
    tensors[0] = rest.reshape(1, dims[0], right)
    return CanonicalMPS(tensors, 0, math.sqrt(err2))


def mpo_to_dense(op: MPO, guard: int = MPO_DENSE_GUARD) -> np.ndarray:
    outs, ins = op.dimensions()
    if math.prod(outs) > guard or math.prod(ins) > guard:
        raise CapacityError("operator too large for dense conversion")
    t = op[0]
    M = t.reshape(t.shape[1], t.shape[2], t.shape[3])  # (J, I, b)
    for t in op.tensors[1:]:
        J, I, _ = M.shape
        M = np.einsum("JIb,bjic->JjIic", M, t).reshape(J * t.shape[1], I * t.shape[2], t.shape[3])
    return M[:, :, 0]


# --------------------------------------------------------------------------
# splits and canonical forms


def _svd(theta: np.ndarray):
    try:
        return scipy.linalg.svd(theta, full_matrices=False, lapack_driver="gesdd", check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        pass
    try:
        return scipy.linalg.svd(theta, full_matrices=False, lapack_driver="gesvd", check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        pass
    scale = np.linalg.norm(theta)
    rng = np.random.default_rng(0)
    jitter = 1e-14 * scale * rng.standard_normal(theta.shape)
    try:
        return scipy.linalg.svd(theta + jitter, full_matrices=False, lapack_driver="gesvd")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError("SVD did not converge") from exc


def schmidt_split(theta, strategy: Strategy = DEFAULT_STRATEGY, sweep: str = "right"):
    """Truncated SVD split ``theta ~= A @ B``.

    ``sweep="right"`` (left-to-right sweeps) makes ``A`` an isometry;
    ``sweep="left"`` makes ``B`` a co-isometry.  Returns ``(A, B, err)`` with
    ``err`` the L2 norm of the discarded singular values.
    """
    theta = np.asarray(theta, dtype=np.complex128)
    if theta.ndim != 2:
        raise ShapeError("schmidt_split expects a matrix")
    if not np.all(np.isfinite(theta)):
        raise NumericalError("non-finite entries in split input")
    U, s, Vh = _svd(theta)
    r, err2 = kernels.truncation_rank(s, strategy.tolerance, strategy.max_bond)
    U, s, Vh = U[:, :r], s[:r], Vh[:r, :]
    if sweep == "right":
        return U, s[:, None] * Vh, math.sqrt(err2)
    if sweep == "left":
        return U * s, Vh, math.sqrt(err2)
    raise ValueError("sweep must be 'right' or 'left'")


def _qr_positive(M: np.ndarray):
    Q, R = scipy.linalg.qr(M, mode="economic", check_finite=False)
    d = np.diagonal(R).copy()
    phase = np.where(np.abs(d) > 0, d / np.where(d == 0, 1, np.abs(d)), 1.0)
    return Q * phase, (R.T * phase.conj()).T


def left_orthogonalize(A: np.ndarray, B: np.ndarray):
    """Exact QR move of the center from ``A`` into its right neighbour ``B``."""
    a, d, b = A.shape
    Q, R = _qr_positive(A.reshape(a * d, b))
    Q = Q.reshape(a, d, -1)
    return Q, np.tensordot(R, B, axes=(1, 0))


def right_orthogonalize(A: np.ndarray, B: np.ndarray):
    """Exact LQ move of the center from ``B`` into its left neighbour ``A``."""
    a, d, b = B.shape
    Q, R = _qr_positive(B.reshape(a, d * b).T)
    Bn = Q.T.reshape(-1, d, b)
    return np.tensordot(A, R.T, axes=(2, 0)), Bn


def _move_center(tensors: list, start: int, stop: int) -> None:
    """Exact QR sweep moving the center from ``start`` to ``stop`` in place."""
    if stop > start:
        for n in range(start, stop):
            tensors[n], tensors[n + 1] = left_orthogonalize(tensors[n], tensors[n + 1])
    else:
        for n in range(start, stop, -1):
            tensors[n - 1], tensors[n] = right_orthogonalize(tensors[n - 1], tensors[n])


def _truncating_sweep(tensors: list, strategy: Strategy, direction: str) -> float:
    """SVD sweep over a chain already in canonical form at the starting end.

    Returns the sum of squared discarded weights.
    """
    L = len(tensors)
    err2 = 0.0
    if direction == "right":
        for n in range(L - 1):
            A = tensors[n]
            a, d, b = A.shape
            U, SV, e = schmidt_split(A.reshape(a * d, b), strategy, "right")
            err2 += e * e
            tensors[n] = U.reshape(a, d, -1)
            tensors[n + 1] = np.tensordot(SV, tensors[n + 1], axes=(1, 0))
    else:
        for n in range(L - 1, 0, -1):
            B = tensors[n]
            a, d, b = B.shape
            US, V, e = schmidt_split(B.reshape(a, d * b), strategy, "left")
            err2 += e * e
            tensors[n] = V.reshape(-1, d, b)
            tensors[n - 1] = np.tensordot(tensors[n - 1], US, axes=(2, 0))
    return err2


def canonicalize(
    m: MPS, center: int = 0, strategy: Strategy = NO_TRUNCATION
) -> CanonicalMPS:
    """Bring ``m`` to canonical form at ``center``, truncating per ``strategy``.

    The truncation happens in a single sweep over an already canonical chain,
    so the reported error equals the true L2 distance up to round-off.
    """
    L = len(m)
    if not 0 <= center < L:
        raise ValueError(f"center {center} outside [0, {L})")
    tensors = m.tensors
    needs_cut = strategy.tolerance > 0 or (
        strategy.max_bond is not None and m.max_bond_dimension() > strategy.max_bond
    )
    if isinstance(m, CanonicalMPS) and not needs_cut:
        _move_center(tensors, m.center, center)
        return CanonicalMPS(tensors, center, m.error)
    if isinstance(m, CanonicalMPS):
        start = m.center
    else:
        start = L - 1
        _move_center(tensors, L - 1, 0)
        start = 0
    if L == 1:
        return CanonicalMPS(tensors, 0, m.error)
    if not needs_cut:
        _move_center(tensors, start, center)
        return CanonicalMPS(tensors, center, m.error)
    # bring center to the end closest to it, then truncate in one sweep
    if center >= L // 2:
        _move_center(tensors, start, 0)
        err2 = _truncating_sweep(tensors, strategy, "right")
        _move_center(tensors, L - 1, center)
    else:
        _move_center(tensors, start, L - 1)
        err2 = _truncating_sweep(tensors, strategy, "left")
        _move_center(tensors, 0, center)
    return CanonicalMPS(tensors, center, m.error + math.sqrt(err2))


def isometry_residuals(m: CanonicalMPS) -> list[float]:
    """||A^dag A - I||_F for every off-center site (left or right unfolding)."""
    out = []
    for n, A in enumerate(m):
        a, d, b = A.shape
        if n < m.center:
            M = A.reshape(a * d, b)
            out.append(float(np.linalg.norm(M.conj().T @ M - np.eye(b))))
        elif n > m.center:
            M = A.reshape(a, d * b)
            out.append(float(np.linalg.norm(M @ M.conj().T - np.eye(a))))
    return out


def norm(m) -> float:
    if isinstance(m, CanonicalMPS):
        return m.norm()
    if isinstance(m, MPSSum):
        m = m.join()
    if not isinstance(m, MPS):
        raise TypeError("norm expects an MPS")
    return math.sqrt(max(kernels.scprod(m.tensors, m.tensors).real, 0.0))


def distance(u, v) -> float:
    """L2 distance between two states, computed without squared cancellation."""
    joined = join_mps([1.0, -1.0], [u, v]) if not isinstance(u, MPSSum) else (u - v).join()
    return canonicalize(joined, 0, NO_TRUNCATION).norm()


# --------------------------------------------------------------------------
# constructors


def random_uniform_mps(
    L: int, d: int = 2, bond: int = 1, seed: int | None = None, complex_values: bool = False
) -> MPS:
    """Random MPS with entries uniform in [-1, 1); interior bonds are capped
    by ``min(bond, d**k, d**(L-k))``."""
    if L < 1 or d < 1 or bond < 1:
        raise ValueError("L, d and bond must be positive")
    rng = np.random.default_rng(seed)
    bonds = [1] + [min(bond, d**k, d ** (L - k)) for k in range(1, L)] + [1]
    tensors = []
    for n in range(L):
        shape = (bonds[n], d, bonds[n + 1])
        t = rng.uniform(-1, 1, shape)
        if complex_values:
            t = t + 1j * rng.uniform(-1, 1, shape)
        tensors.append(t)
    return MPS(tensors)


def product_state(vectors: Sequence) -> MPS:
    """MPS with bond dimension one from a list of local vectors."""
    return MPS([np.asarray(v, dtype=np.complex128).reshape(1, -1, 1) for v in vectors])


def ones_mps(dims: Sequence[int]) -> MPS:
    return product_state([np.ones(d) for d in dims])


def basis_state(index: int, dims: Sequence[int]) -> MPS:
    """Canonical basis vector e_index as a product state."""
    digits = []
    for d in reversed(dims):
        digits.append(index % d)
        index //= d
    digits.reverse()
    return product_state([np.eye(d)[s] for d, s in zip(dims, digits)])


def zero_mps(dims: Sequence[int]) -> CanonicalMPS:
    return CanonicalMPS([np.zeros((1, d, 1)) for d in dims], 0)


def mpo_identity(L: int, d: int | Sequence[int] = 2) -> MPO:
    dims = [d] * L if np.isscalar(d) else list(d)
    return MPO([np.eye(k).reshape(1, k, k, 1) for k in dims])


def mpo_from_local_operators(ops: Sequence) -> MPO:
    """Tensor product of local matrices (bond dimension one)."""
    return MPO([np.asarray(o, dtype=np.complex128)[None, :, :, None] for o in ops])


def mpo_from_dense(M, dims_out: Sequence[int], dims_in: Sequence[int] | None = None,
                   strategy: Strategy = NO_TRUNCATION) -> MPO:
    """Decompose a dense matrix into an MPO by sequential SVD."""
    dims_in = list(dims_out) if dims_in is None else list(dims_in)
    dims_out = list(dims_out)
    M = np.asarray(M, dtype=np.complex128)
    L = len(dims_out)
    T = M.reshape(dims_out + dims_in)
    perm = [x for k in range(L) for x in (k, L + k)]
    v = T.transpose(perm).reshape(-1)
    state = mps_from_dense(v, [o * i for o, i in zip(dims_out, dims_in)], strategy)
    return mps_as_mpo(state, (dims_out, dims_in))
