"""Grids on intervals and the map from MPS site bits to grid indices."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class IntervalKind(enum.Enum):
    REGULAR_HALF_OPEN = "regular_half_open"
    REGULAR_CLOSED = "regular_closed"
    CHEBYSHEV_LOBATTO = "chebyshev_lobatto"
    CHEBYSHEV_GAUSS = "chebyshev_gauss"


@dataclass(frozen=True)
class Interval:
    """``2**n_qubits`` points on ``[a, b]``.

    * REGULAR_HALF_OPEN: ``a + i (b - a) / N``
    * REGULAR_CLOSED: ``a + i (b - a) / (N - 1)``
    * CHEBYSHEV_LOBATTO: affine image of ``cos(j pi / (N - 1))`` (descending)
    * CHEBYSHEV_GAUSS: affine image of ``cos((2 j + 1) pi / (2 N))``
    """

    kind: IntervalKind
    a: float
    b: float
    n_qubits: int

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", IntervalKind(self.kind.lower()))
        if not self.a < self.b:
            raise ValueError("interval needs a < b")
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")

    @property
    def size(self) -> int:
        return 2**self.n_qubits

    @property
    def regular(self) -> bool:
        return self.kind in (IntervalKind.REGULAR_HALF_OPEN, IntervalKind.REGULAR_CLOSED)

    @property
    def step(self) -> float:
        if self.kind is IntervalKind.REGULAR_HALF_OPEN:
            return (self.b - self.a) / self.size
        if self.kind is IntervalKind.REGULAR_CLOSED:
            return (self.b - self.a) / (self.size - 1)
        raise ValueError("Chebyshev grids have no uniform step")

    @property
    def length(self) -> float:
        return self.b - self.a

    def points_at(self, i) -> np.ndarray:
        i = np.asarray(i)
        N = self.size
        if self.regular:
            return self.a + i * self.step
        if self.kind is IntervalKind.CHEBYSHEV_LOBATTO:
            t = np.cos(i * np.pi / (N - 1))
        else:
            t = np.cos((2 * i + 1) * np.pi / (2 * N))
        return 0.5 * (self.a + self.b) + 0.5 * (self.b - self.a) * t

    def points(self) -> np.ndarray:
        return self.points_at(np.arange(self.size))

    def refine(self, extra: int = 1) -> "Interval":
        return Interval(self.kind, self.a, self.b, self.n_qubits + extra)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "a": self.a, "b": self.b, "qubits": self.n_qubits}

    @classmethod
    def from_json(cls, data: dict) -> "Interval":
        return cls(IntervalKind(data["kind"].lower()), float(data["a"]), float(data["b"]), int(data["qubits"]))


def RegularInterval(a: float, b: float, n: int, closed: bool = False) -> Interval:
    kind = IntervalKind.REGULAR_CLOSED if closed else IntervalKind.REGULAR_HALF_OPEN
    return Interval(kind, a, b, n)


class IndexMap:
    """Linear map from site bits ``s`` to per-dimension indices ``i = W s``.

    ``W`` has one row per dimension holding the binary weight of every site.
    """

    def __init__(self, weights: np.ndarray):
        self.weights = np.asarray(weights, dtype=np.int64)

    @property
    def sites(self) -> int:
        return self.weights.shape[1]

    @property
    def dimensions(self) -> int:
        return self.weights.shape[0]

    def __call__(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        return bits @ self.weights.T

    def inverse(self, indices) -> np.ndarray:
        """Bits for each row of per-dimension indices."""
        indices = np.atleast_2d(np.asarray(indices, dtype=np.int64))
        out = np.zeros((indices.shape[0], self.sites), dtype=np.int64)
        for dim in range(self.dimensions):
            for site in np.nonzero(self.weights[dim])[0]:
                w = self.weights[dim, site]
                out[:, site] = (indices[:, dim] // w) % 2
        return out


def mps_to_mesh_map(qubits_per_dim: Sequence[int], order: str = "A") -> IndexMap:
    """Binary weights for order A (dimension blocks) or B (scale interleaved)."""
    qubits = [int(q) for q in qubits_per_dim]
    total = sum(qubits)
    W = np.zeros((len(qubits), total), dtype=np.int64)
    if order == "A":
        site = 0
        for dim, n in enumerate(qubits):
            for k in range(n):
                W[dim, site] = 2 ** (n - 1 - k)
                site += 1
    elif order == "B":
        if len(set(qubits)) != 1:
            raise ValueError("order B needs the same number of qubits per dimension")
        n, M = qubits[0], len(qubits)
        for k in range(n):
            for dim in range(M):
                W[dim, k * M + dim] = 2 ** (n - 1 - k)
    else:
        raise ValueError("order must be 'A' or 'B'")
    return IndexMap(W)


class Mesh:
    """Product of intervals with a qubit ordering."""

    def __init__(self, intervals: Sequence[Interval], order: str = "A"):
        self.intervals = list(intervals)
        if not self.intervals:
            raise ValueError("mesh needs at least one interval")
        self.order = order
        self.map = mps_to_mesh_map([iv.n_qubits for iv in self.intervals], order)

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    @property
    def sites(self) -> int:
        return self.map.sites

    def coordinates(self, indices) -> np.ndarray:
        """Coordinates of per-dimension integer indices, shape (batch, dims)."""
        indices = np.atleast_2d(indices)
        return np.stack([iv.points_at(indices[:, k]) for k, iv in enumerate(self.intervals)], axis=1)

    def coordinates_from_bits(self, bits) -> np.ndarray:
        return self.coordinates(self.map(bits))

    def to_json(self) -> dict:
        return {"order": self.order, "intervals": [iv.to_json() for iv in self.intervals]}
