"""Named builtin functions for configuration files.

Each entry evaluates ``f(x)`` on coordinates of shape ``(batch, dims)``.
One-dimensional functions act on the first coordinate; ``exp``, ``sin``,
``cos`` and ``gaussian`` act on the sum (or squared distance) of all
coordinates.  New functions are added with :func:`register`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import MPS
from .funcrep import factories
from .funcrep.mesh import Interval


@dataclass
class Builtin:
    name: str
    evaluate: Callable[[np.ndarray, dict], np.ndarray]
    derivative: Callable[[np.ndarray, dict], np.ndarray] | None = None
    closed_form: Callable[[Interval, dict], MPS] | None = None
    defaults: dict = field(default_factory=dict)

    def params(self, given: dict | None) -> dict:
        p = dict(self.defaults)
        p.update(given or {})
        unknown = set(p) - set(self.defaults)
        if unknown:
            raise ValueError(f"function.params: unknown keys {sorted(unknown)} for {self.name!r}")
        return p


FUNCTIONS: dict[str, Builtin] = {}


def register(b: Builtin) -> Builtin:
    FUNCTIONS[b.name] = b
    return b


def lookup(name: str) -> Builtin:
    if name not in FUNCTIONS:
        raise KeyError(f"function.name: unknown builtin {name!r}; known: {sorted(FUNCTIONS)}")
    return FUNCTIONS[name]


def _s(x):
    return np.asarray(x).sum(axis=1)


register(Builtin(
    "constant",
    lambda x, p: np.full(x.shape[0], p["value"], dtype=float),
    lambda x, p: np.zeros(x.shape[0]),
    lambda iv, p: factories.mps_constant(p["value"], iv),
    {"value": 1.0},
))
register(Builtin(
    "one",
    lambda x, p: np.ones(x.shape[0]),
    lambda x, p: np.zeros(x.shape[0]),
    lambda iv, p: factories.mps_constant(1.0, iv),
    {},
))
register(Builtin(
    "interval",
    lambda x, p: x[:, 0].astype(float),
    lambda x, p: np.ones(x.shape[0]),
    lambda iv, p: factories.mps_interval(iv),
    {},
))
register(Builtin(
    "exp",
    lambda x, p: p["amplitude"] * np.exp(p["k"] * _s(x)),
    lambda x, p: p["amplitude"] * p["k"] * np.exp(p["k"] * _s(x)),
    lambda iv, p: factories.mps_exponential(p["k"], iv, p["amplitude"]),
    {"k": 1.0, "amplitude": 1.0},
))
register(Builtin(
    "sin",
    lambda x, p: p["amplitude"] * np.sin(p["k"] * _s(x) + p["phase"]),
    lambda x, p: p["amplitude"] * p["k"] * np.cos(p["k"] * _s(x) + p["phase"]),
    lambda iv, p: factories.mps_sin(p["k"], iv, p["amplitude"], p["phase"]),
    {"k": 1.0, "amplitude": 1.0, "phase": 0.0},
))
register(Builtin(
    "cos",
    lambda x, p: p["amplitude"] * np.cos(p["k"] * _s(x) + p["phase"]),
    lambda x, p: -p["amplitude"] * p["k"] * np.sin(p["k"] * _s(x) + p["phase"]),
    lambda iv, p: factories.mps_cos(p["k"], iv, p["amplitude"], p["phase"]),
    {"k": 1.0, "amplitude": 1.0, "phase": 0.0},
))


def _gauss(x, p):
    r2 = ((np.asarray(x) - p["mu"]) ** 2).sum(axis=1)
    return np.exp(-r2 / (2 * p["sigma"] ** 2))


register(Builtin(
    "gaussian",
    _gauss,
    lambda x, p: -(_s(x) - x.shape[1] * p["mu"]) / p["sigma"] ** 2 * _gauss(x, p),
    None,
    {"mu": 0.0, "sigma": 1.0},
))
register(Builtin(
    "heaviside",
    lambda x, p: (p["sign"] * (x[:, 0] - p["x0"]) >= 0).astype(float),
    None,
    lambda iv, p: factories.mps_heaviside(iv, p["x0"], int(p["sign"])),
    {"x0": 0.0, "sign": 1},
))
register(Builtin(
    "abs",
    lambda x, p: np.abs(x[:, 0]),
    lambda x, p: np.sign(x[:, 0]),
    lambda iv, p: factories.mps_abs(iv),
    {},
))
