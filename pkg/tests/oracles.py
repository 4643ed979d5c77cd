"""Dense reference implementations shared by the test modules."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ttlab.core import MPO

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Y = np.array([[0.0, -1j], [1j, 0.0]])
Z = np.diag([1.0, -1.0])
I2 = np.eye(2)


def dense(m) -> np.ndarray:
    """Full vector of an MPS by explicit left-to-right contraction."""
    out = np.ones((1, 1), dtype=complex)
    for A in m.tensors:
        out = np.einsum("xa,asb->xsb", out, A).reshape(-1, A.shape[-1])
    return out[:, 0]


def dense_mpo(op) -> np.ndarray:
    """Full matrix of an MPO; rows index outputs in the same big-endian order."""
    out = np.ones((1, 1, 1), dtype=complex)
    for W in op.tensors:
        a, i, j, b = W.shape
        out = np.einsum("xya,aijb->xiyjb", out, W)
        out = out.reshape(out.shape[0] * i, out.shape[2] * j, b)
    return out[:, :, 0]


def random_mpo(n: int, chi: int, rng, d: int = 2, complex_values: bool = True) -> MPO:
    ts = []
    for k in range(n):
        a = 1 if k == 0 else chi
        b = 1 if k == n - 1 else chi
        t = rng.normal(size=(a, d, d, b))
        if complex_values:
            t = t + 1j * rng.normal(size=(a, d, d, b))
        ts.append(t / np.sqrt(d * chi))
    return MPO(ts)


def kron_all(ops) -> np.ndarray:
    out = np.eye(1)
    for o in ops:
        out = np.kron(out, o)
    return out


def embed(N: int, ops: dict) -> np.ndarray:
    """Kronecker product with ``ops[site]`` on the listed sites and identities elsewhere."""
    return kron_all([ops.get(k, I2) for k in range(N)])


def tfi_dense(N: int, g: float, J: float = 1.0) -> np.ndarray:
    H = np.zeros((2**N, 2**N))
    for i in range(N - 1):
        H -= J * embed(N, {i: Z, i + 1: Z})
    for i in range(N):
        H -= g * embed(N, {i: X})
    return H


def interleave(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """Kronecker product of two n-qubit vectors with sites ordered (u1, v1, u2, v2, ...)."""
    t = np.kron(u, v).reshape((2,) * (2 * n))
    perm = [k for pair in zip(range(n), range(n, 2 * n)) for k in pair]
    return t.transpose(perm).reshape(-1)


def expm_apply(H: np.ndarray, v: np.ndarray, t: complex) -> np.ndarray:
    return scipy.linalg.expm(t * H) @ v


def second_difference_plus_identity(n: int) -> np.ndarray:
    N = 2**n
    return 3.0 * np.eye(N) - np.eye(N, k=1) - np.eye(N, k=-1)
