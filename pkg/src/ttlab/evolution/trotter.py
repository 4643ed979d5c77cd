"""Even/odd bond-gate splitting for nearest-neighbour Hamiltonians."""

from __future__ import annotations

import numpy as np

from ..core import NO_TRUNCATION, CanonicalMPS, MPS, Strategy, _move_center, canonicalize, schmidt_split
from ..hamiltonians import NNHamiltonian
from .spec import EvolutionSpec, finish_step

# Ruth's third-order composition: exp(d3 B) exp(c3 A) exp(d2 B) exp(c2 A) exp(d1 B) exp(c1 A),
# with the rightmost factor applied first (A = even bonds, B = odd bonds).
RUTH_C = (7 / 24, 3 / 4, -1 / 24)
RUTH_D = (2 / 3, -2 / 3, 1.0)


def _apply_layer(tensors: list, center: int, gates: dict, strategy: Strategy) -> tuple[int, float]:
    """Apply two-site gates ``{bond: U}`` in increasing bond order; returns (center, err)."""
    err = 0.0
    for i in sorted(gates):
        _move_center(tensors, center, i)
        A, B = tensors[i], tensors[i + 1]
        a, d1, _ = A.shape
        _, d2, b = B.shape
        theta = np.tensordot(A, B, axes=(2, 0))  # a s t b
        U = gates[i].reshape(d1, d2, d1, d2)
        theta = np.einsum("stuv,auvb->astb", U, theta)
        An, Bn, e = schmidt_split(theta.reshape(a * d1, d2 * b), strategy, "right")
        tensors[i] = An.reshape(a, d1, -1)
        tensors[i + 1] = Bn.reshape(-1, d2, b)
        center = i + 1
        err += e
    return center, err


def _sequence(order: int) -> list[tuple[int, float]]:
    """(parity, fraction of dt) in application order."""
    if order == 2:
        return [(0, 0.5), (1, 1.0), (0, 0.5)]
    if order == 3:
        seq = []
        for c, d in zip(RUTH_C, RUTH_D):
            seq.append((0, c))
            seq.append((1, d))
        return seq
    raise ValueError("order must be 2 or 3")


def trotter_step(ham: NNHamiltonian, v: MPS, spec: EvolutionSpec, order: int = 2) -> CanonicalMPS:
    """One split step ``exp(-dt Hbar)`` with even (0, 2, ...) and odd bond layers.

    Order 2 is ``U0(dt/2) U1(dt) U0(dt/2)``; order 3 uses Ruth's coefficients.
    Each gate is split by a truncated SVD under ``spec.strategy``.
    """
    if len(v) != ham.size:
        raise ValueError("state and Hamiltonian sizes differ")
    state = canonicalize(v, 0, NO_TRUNCATION) if not isinstance(v, CanonicalMPS) else v
    tensors = state.tensors
    center = state.center
    err = 0.0
    eps = spec.factor * spec.dt
    for parity, frac in _sequence(order):
        gates = {i: ham.gate(i, frac * eps) for i in range(parity, len(ham.bonds), 2)}
        if gates:
            center, e = _apply_layer(tensors, center, gates, spec.strategy)
            err += e
    _move_center(tensors, center, 0)
    out = CanonicalMPS(tensors, 0, state.error + err)
    return finish_step(out, spec)
