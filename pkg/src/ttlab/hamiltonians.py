"""Hamiltonian MPOs from interaction graphs and nearest-neighbour terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .blas import simplify_mpo
from .core import MPO, Method, MPOSum, Strategy, mpo_from_local_operators

GRAPH_STRATEGY = Strategy(method=Method.SVD_TRUNCATE, tolerance=1e-14, simplification_tolerance=1e-14)

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "SP": np.array([[0, 1], [0, 0]], dtype=np.complex128),
    "SM": np.array([[0, 0], [1, 0]], dtype=np.complex128),
}


def operator_from_json(op) -> np.ndarray:
    """Named Pauli (``"X"``, ``"Z"``, ...) or a matrix given as nested lists.

    Complex entries may be written as ``[re, im]`` pairs or as a
    ``{"re": ..., "im": ...}`` object of two real matrices.
    """
    if isinstance(op, str):
        key = op.upper()
        if key not in PAULI:
            raise ValueError(f"unknown operator name {op!r}")
        return PAULI[key]
    if isinstance(op, dict):
        return np.asarray(op["re"], dtype=float) + 1j * np.asarray(op.get("im", 0.0), dtype=float)
    a = np.asarray(op, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a.astype(np.complex128)


@dataclass
class InteractionGraph:
    """Local terms ``h_i O_i`` and two-body terms ``J_ij A_i B_j`` on a chain of sites."""

    dims: list[int]
    local: list = field(default_factory=list)
    pairs: list = field(default_factory=list)

    def __post_init__(self):
        self.dims = [int(d) for d in self.dims]
        if not self.dims:
            raise ValueError("graph needs at least one site")

    @property
    def size(self) -> int:
        return len(self.dims)

    def _check(self, site: int, op) -> np.ndarray:
        if not 0 <= site < self.size:
            raise IndexError(f"site {site} out of range for {self.size} sites")
        op = np.asarray(op, dtype=np.complex128)
        d = self.dims[site]
        if op.shape != (d, d):
            raise ValueError(f"operator on site {site} must be {d}x{d}, got {op.shape}")
        return op

    def add_local(self, site: int, op, h: complex = 1.0) -> "InteractionGraph":
        self.local.append((site, complex(h) * self._check(site, op)))
        return self

    def add_pair(self, i: int, j: int, op_i, op_j, J: complex = 1.0) -> "InteractionGraph":
        if i == j:
            raise ValueError("two-body term needs i != j")
        A, B = self._check(i, op_i), self._check(j, op_j)
        if i > j:
            i, j, A, B = j, i, B, A
        self.pairs.append((i, j, A, B, complex(J)))
        return self

    def add_couplings(self, J, op_i, op_j=None) -> "InteractionGraph":
        """Add ``J[i, j] A_i B_j`` for every nonzero entry with ``i < j``."""
        J = np.asarray(J)
        if J.shape != (self.size, self.size):
            raise ValueError("coupling matrix must be sites x sites")
        op_j = op_i if op_j is None else op_j
        for i in range(self.size):
            for j in range(i + 1, self.size):
                if J[i, j] != 0:
                    self.add_pair(i, j, op_i, op_j, J[i, j])
        return self

    def add_two_site(self, i: int, matrix) -> "InteractionGraph":
        """Add a dense operator on sites ``i, i+1`` as a sum of products."""
        d1, d2 = self.dims[i], self.dims[i + 1]
        M = np.asarray(matrix, dtype=np.complex128).reshape(d1, d2, d1, d2)
        # operator Schmidt decomposition: M = sum_k A_k (x) B_k
        U, s, Vh = np.linalg.svd(M.transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2))
        for k in np.nonzero(s > 1e-15 * max(s[0], 1e-300))[0]:
            self.add_pair(i, i + 1, U[:, k].reshape(d1, d1) * s[k], Vh[k].reshape(d2, d2))
        return self

    def terms(self) -> list[MPO]:
        eye = [np.eye(d) for d in self.dims]
        out = []
        for site, op in self.local:
            ops = list(eye)
            ops[site] = op
            out.append(mpo_from_local_operators(ops))
        for i, j, A, B, J in self.pairs:
            ops = list(eye)
            ops[i] = J * A
            ops[j] = B
            out.append(mpo_from_local_operators(ops))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "InteractionGraph":
        g = cls(list(data["dims"]))
        for t in data.get("local", []):
            g.add_local(int(t["site"]), operator_from_json(t["op"]), t.get("h", 1.0))
        for t in data.get("pairs", []):
            g.add_pair(int(t["i"]), int(t["j"]), operator_from_json(t["opi"]),
                       operator_from_json(t["opj"]), t.get("J", 1.0))
        return g


def graph_to_mpo(g: InteractionGraph, strategy: Strategy = GRAPH_STRATEGY) -> MPO:
    """Sum of all graph terms as one compressed MPO.

    Every term is a bond-one product MPO.  The sum is flattened to an MPS,
    simplified with ``strategy`` and reshaped back.
    """
    terms = g.terms()
    if not terms:
        return MPO([np.zeros((1, d, d, 1), dtype=np.complex128) for d in g.dims])
    return simplify_mpo(MPOSum([1.0] * len(terms), terms), strategy)


@dataclass
class NNHamiltonian:
    """``H = sum_i H_{i,i+1}`` with dense two-site terms of shape ``(d_i d_{i+1})**2``."""

    dims: list[int]
    bonds: list[np.ndarray]

    def __post_init__(self):
        self.dims = [int(d) for d in self.dims]
        if len(self.bonds) != len(self.dims) - 1:
            raise ValueError("need one term per bond")
        out = []
        for i, h in enumerate(self.bonds):
            h = np.asarray(h, dtype=np.complex128)
            D = self.dims[i] * self.dims[i + 1]
            if h.shape != (D, D):
                raise ValueError(f"bond {i} term must be {D}x{D}")
            if np.abs(h - h.conj().T).max() > 1e-12 * max(np.abs(h).max(), 1.0):
                raise ValueError(f"bond {i} term is not hermitian")
            out.append(h)
        self.bonds = out

    @property
    def size(self) -> int:
        return len(self.dims)

    @classmethod
    def translation_invariant(cls, L: int, term, d: int = 2) -> "NNHamiltonian":
        return cls([d] * L, [np.asarray(term, dtype=np.complex128)] * (L - 1))

    def gate(self, bond: int, eps: complex) -> np.ndarray:
        """``exp(-eps H_{bond, bond+1})``."""
        return scipy.linalg.expm(-eps * self.bonds[bond])

    def graph(self) -> InteractionGraph:
        g = InteractionGraph(self.dims)
        for i, h in enumerate(self.bonds):
            g.add_two_site(i, h)
        return g


def nn_hamiltonian(ham: NNHamiltonian, strategy: Strategy = GRAPH_STRATEGY) -> tuple[MPO, Callable]:
    """MPO of ``ham`` and a factory ``gates(eps) -> [exp(-eps H_{i,i+1}) for each bond]``."""

    def gates(eps: complex) -> list[np.ndarray]:
        return [ham.gate(i, eps) for i in range(len(ham.bonds))]

    return graph_to_mpo(ham.graph(), strategy), gates


def tfi_graph(N: int, g: float, J: float = 1.0) -> InteractionGraph:
    """Open transverse-field Ising chain ``-J sum Z_i Z_{i+1} - g sum X_i``."""
    graph = InteractionGraph([2] * N)
    for i in range(N):
        graph.add_local(i, PAULI["X"], -g)
    for i in range(N - 1):
        graph.add_pair(i, i + 1, PAULI["Z"], PAULI["Z"], -J)
    return graph


def tfi_mpo(N: int, g: float, J: float = 1.0) -> MPO:
    return graph_to_mpo(tfi_graph(N, g, J))


def tfi_nn(N: int, g: float, J: float = 1.0) -> NNHamiltonian:
    """The same chain as :func:`tfi_graph` with fields split between adjacent bonds."""
    if N < 2:
        raise ValueError("nearest-neighbour form needs N >= 2")
    X, Z, I = PAULI["X"], PAULI["Z"], PAULI["I"]
    bonds = []
    for i in range(N - 1):
        wl = 1.0 if i == 0 else 0.5
        wr = 1.0 if i == N - 2 else 0.5
        bonds.append(-J * np.kron(Z, Z) - g * (wl * np.kron(X, I) + wr * np.kron(I, X)))
    return NNHamiltonian([2] * N, bonds)


def heisenberg_nn(N: int, J: float = 1.0, Jz: float | None = None) -> NNHamiltonian:
    """``J (X X + Y Y) + Jz Z Z`` on every bond (``Jz`` defaults to ``J``)."""
    Jz = J if Jz is None else Jz
    X, Y, Z = PAULI["X"], PAULI["Y"], PAULI["Z"]
    term = J * (np.kron(X, X) + np.kron(Y, Y)) + Jz * np.kron(Z, Z)
    return NNHamiltonian.translation_invariant(N, term)


__all__ = [
    "GRAPH_STRATEGY",
    "InteractionGraph",
    "NNHamiltonian",
    "PAULI",
    "graph_to_mpo",
    "heisenberg_nn",
    "nn_hamiltonian",
    "operator_from_json",
    "tfi_graph",
    "tfi_mpo",
    "tfi_nn",
]
