"""JSON schemas (version 1) for run configurations and results."""

from __future__ import annotations

SCHEMA_VERSION = 1

TASKS = ["load", "integrate", "derive", "solve-eig", "solve-linear", "evolve", "qft", "bench"]

_INTERVAL = {
    "type": "object",
    "required": ["kind", "a", "b", "qubits"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["regular_half_open", "regular_closed", "chebyshev_lobatto", "chebyshev_gauss"]},
        "a": {"type": "number"},
        "b": {"type": "number"},
        "qubits": {"type": "integer", "minimum": 1, "maximum": 40},
    },
}

_STRATEGY = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "method": {"enum": ["svd", "variational"]},
        "tolerance": {"type": "number", "minimum": 0},
        "simplification_tolerance": {"type": "number", "minimum": 0},
        "max_bond": {"type": ["integer", "null"], "minimum": 1},
        "max_sweeps": {"type": "integer", "minimum": 1},
        "normalize": {"type": "boolean"},
    },
}

_HAMILTONIAN = {
    "type": "object",
    "oneOf": [
        {
            "required": ["model", "N"],
            "properties": {
                "model": {"enum": ["tfi", "heisenberg"]},
                "N": {"type": "integer", "minimum": 2, "maximum": 64},
                "g": {"type": "number"},
                "J": {"type": "number"},
            },
        },
        {
            "required": ["dims"],
            "properties": {
                "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "local": {"type": "array"},
                "pairs": {"type": "array"},
            },
        },
    ],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "task"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "task": {"enum": TASKS},
        "seed": {"type": "integer", "minimum": 0},
        "mesh": {
            "type": "object",
            "required": ["intervals"],
            "additionalProperties": False,
            "properties": {
                "order": {"enum": ["A", "B"]},
                "intervals": {"type": "array", "items": _INTERVAL, "minItems": 1},
            },
        },
        "function": {
            "type": "object",
            "required": ["name"],
            "additionalProperties": False,
            "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
        },
        "method": {"type": "string"},
        "strategy": _STRATEGY,
        "rule": {"enum": ["trapezoidal", "simpson38", "fifth_order", "clenshaw_curtis", "fejer"]},
        "derivative": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["fd", "fourier"]},
                "order": {"type": "integer", "minimum": 1},
                "accuracy": {"type": "integer", "minimum": 2},
                "boundary": {"enum": ["open", "periodic"]},
            },
        },
        "hamiltonian": _HAMILTONIAN,
        "linear": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "system": {"enum": ["second_difference"]},
                "qubits": {"type": "integer", "minimum": 1, "maximum": 30},
                "shift": {"type": "number"},
            },
        },
        "evolution": {
            "type": "object",
            "required": ["dt", "t_final"],
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["real", "imaginary"]},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_final": {"type": "number", "minimum": 0},
                "tolerances": {"type": "object"},
                "observables": {"type": "array", "items": {"enum": ["energy", "norm", "sz", "sx"]}},
                "initial": {"enum": ["up", "plus", "random"]},
            },
        },
        "tolerances": {"type": "object"},
        "max_iterations": {"type": "integer", "minimum": 1},
        "bench": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "suites": {"type": "array", "items": {"enum": ["blas", "solvers", "qft", "tci"]}},
                "sizes": {"type": "array", "items": {"type": "integer", "minimum": 2, "maximum": 40}},
                "chis": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "repetitions": {"type": "integer", "minimum": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}, "csv": {"type": "boolean"}, "samples": {"type": "integer"}},
        },
    },
}

RESULT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "task", "status", "timings"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "task": {"enum": TASKS},
        "status": {"enum": ["ok", "not_converged"]},
        "seed": {"type": "integer"},
        "value": {},
        "values": {"type": "object"},
        "error_estimate": {"type": "number", "minimum": 0},
        "bond_dimensions": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "timings": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
        "evaluations": {"type": "integer", "minimum": 0},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array"},
        "backend": {"enum": ["compiled", "python"]},
    },
}

ERROR_SCHEMA = {
    "type": "object",
    "required": ["schema", "status", "message"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "status": {"enum": ["validation_error", "numerical_error"]},
        "message": {"type": "string"},
    },
}
