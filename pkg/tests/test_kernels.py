import os
import subprocess
import sys

import numpy as np
import pytest
from oracles import dense

from ttlab import kernels
from ttlab.core import random_uniform_mps

BACKENDS = kernels.backends()


def test_compiled_backend_available():
    assert "compiled" in BACKENDS, "build the extension with `pip install -e . --no-build-isolation`"
    expected = "python" if os.environ.get("TTLAB_PURE") == "1" else "compiled"
    assert kernels.BACKEND == expected


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_scprod_matches_dense(name):
    mod = BACKENDS[name]
    u = random_uniform_mps(7, 2, 5, seed=1, complex_values=True)
    v = random_uniform_mps(7, 2, 3, seed=2, complex_values=True)
    got = mod.scprod([np.ascontiguousarray(t) for t in u.tensors], [np.ascontiguousarray(t) for t in v.tensors])
    assert abs(got - np.vdot(dense(u), dense(v))) <= 1e-12 * abs(got)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_environments_match_einsum(name, rng):
    mod = BACKENDS[name]
    A = rng.normal(size=(3, 2, 4)) + 1j * rng.normal(size=(3, 2, 4))
    B = rng.normal(size=(5, 2, 6)) + 1j * rng.normal(size=(5, 2, 6))
    E = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    ref = np.einsum("ab,asc,bsd->cd", E, A.conj(), B)
    np.testing.assert_allclose(mod.env_left(E, A, B), ref, atol=1e-12)
    F = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
    ref = np.einsum("asc,bsd,cd->ab", A.conj(), B, F)
    np.testing.assert_allclose(mod.env_right(F, A, B), ref, atol=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_truncation_rank(name):
    mod = BACKENDS[name]
    s = np.array([1.0, 0.5, 1e-3, 1e-8, 0.0])
    assert mod.truncation_rank(s, 0.0, 0) == (4, 0.0)
    r, err2 = mod.truncation_rank(s, 1e-4, 0)
    assert r == 3 and err2 == pytest.approx(1e-16)
    r, err2 = mod.truncation_rank(s, 0.0, 2)
    assert r == 2 and err2 == pytest.approx(1e-6 + 1e-16)
    assert mod.truncation_rank(np.zeros(3), 0.0, 0)[0] == 1


def test_backends_agree_bitwise_close():
    mods = list(BACKENDS.values())
    u = random_uniform_mps(10, 2, 8, seed=5, complex_values=True)
    ts = [np.ascontiguousarray(t) for t in u.tensors]
    vals = [m.scprod(ts, ts) for m in mods]
    assert all(abs(v - vals[0]) <= 1e-12 * abs(vals[0]) for v in vals)


def test_pure_python_fallback_selected_by_env():
    code = "import ttlab.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"TTLAB_PURE": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
