"""Quantum Fourier transform as a list of exact MPO layers.

Layer ``i`` applies a Hadamard to qubit ``i`` and the controlled phases
between qubit ``i`` and every later qubit.  The bond carries the output bit
of qubit ``i``, so each layer has bond dimension 2.  The bare product
yields the DFT with its output bits reversed; ``qft_flip`` undoes that.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..blas import apply
from ..core import DEFAULT_STRATEGY, MPO, MPOList, MPS, Strategy

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _layer(L: int, qubits: Sequence[int], i: int, sign: float) -> MPO:
    """Hadamard on ``qubits[i]`` plus phases with ``qubits[j]`` for j > i."""
    target = qubits[i]
    # phase exponent denominators for each later qubit, keyed by site
    later = {qubits[j]: 2.0 ** (j - i + 1) for j in range(i + 1, len(qubits))}
    last = max(later) if later else target
    tensors = []
    for site in range(L):
        if site < target or site > last:
            tensors.append(np.eye(2).reshape(1, 2, 2, 1))
            continue
        if site == target:
            right = 2 if later else 1
            T = np.zeros((1, 2, 2, right), dtype=np.complex128)
            for o in range(2):
                T[0, o, :, o if later else 0] = _H[o, :]
            tensors.append(T)
            continue
        right = 1 if site == last else 2
        T = np.zeros((2, 2, 2, right), dtype=np.complex128)
        for bit in range(2):
            for s in range(2):
                phase = 1.0
                if site in later:
                    phase = np.exp(sign * 2j * np.pi * s * bit / later[site])
                T[bit, s, s, 0 if right == 1 else bit] = phase
        tensors.append(T)
    return MPO(tensors)


def qft_mpo(n: int, inverse: bool = False, sites: Sequence[int] | None = None) -> MPOList:
    """QFT on an ``n``-site qubit chain, optionally restricted to ``sites``.

    The forward transform uses the kernel ``exp(-2 pi i j k / N) / sqrt(N)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    qubits = list(range(n)) if sites is None else [int(s) for s in sites]
    if not qubits or any(not 0 <= q < n for q in qubits) or sorted(qubits) != qubits:
        raise ValueError("sites must be an increasing subset of range(n)")
    layers = [_layer(n, qubits, i, -1.0) for i in range(len(qubits))]
    if inverse:
        return MPOList([m.dagger() for m in reversed(layers)])
    return MPOList(layers)


def iqft_mpo(n: int, sites: Sequence[int] | None = None) -> MPOList:
    return qft_mpo(n, inverse=True, sites=sites)


def qft_flip(v: MPS) -> MPS:
    """Reverse the site order (bit reversal of the dense index)."""
    return MPS([t.transpose(2, 1, 0) for t in reversed(v.tensors)], v.error)


def qft(v: MPS, strategy: Strategy = DEFAULT_STRATEGY) -> MPS:
    """Bit-reversed DFT of ``v``."""
    return apply(qft_mpo(len(v)), v, strategy)


def iqft(v: MPS, strategy: Strategy = DEFAULT_STRATEGY) -> MPS:
    return apply(qft_mpo(len(v), inverse=True), v, strategy)
