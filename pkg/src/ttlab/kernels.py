"""Backend selection for the hot contraction kernels.

The compiled extension ``ttlab._kernels`` is used when it was built and
``TTLAB_PURE`` is not set to ``1``; otherwise the NumPy fallback is used.
Both expose the same four functions with identical results up to
floating-point reassociation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("TTLAB_PURE", "") != "1":
    try:
        from . import _kernels as _ext  # type: ignore[attr-defined]
    except ImportError:  # extension not compiled
        pass
    else:
        _impl = _ext
        BACKEND = "compiled"


def _c(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.complex128)


def truncation_rank(s: np.ndarray, tolerance: float, max_bond: int | None) -> tuple[int, float]:
    return _impl.truncation_rank(
        np.ascontiguousarray(s, dtype=np.float64), float(tolerance), int(max_bond or 0)
    )


def env_left(E: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return _impl.env_left(_c(E), _c(A), _c(B))


def env_right(E: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return _impl.env_right(_c(E), _c(A), _c(B))


def scprod(bra, ket) -> complex:
    return _impl.scprod([_c(A) for A in bra], [_c(B) for B in ket])


def backends() -> dict:
    """Map of available backend name to module, for benchmarks and tests."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels as _ext  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        out["compiled"] = _ext
    return out
