"""Command-line front end ``ttlab``.

Exit codes: 0 success, 2 invalid input (arguments, JSON, schema or
configuration values), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__, registry
from .blas import apply, expectation_local, expectation_mpo, scprod
from .core import (
    DEFAULT_STRATEGY,
    MPS,
    Method,
    NumericalError,
    Strategy,
    TTError,
    canonicalize,
    mpo_to_dense,
    product_state,
    random_uniform_mps,
)
from .kernels import BACKEND
from .schema import CONFIG_SCHEMA, RESULT_SCHEMA, SCHEMA_VERSION, TASKS

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


class ValidationFailure(Exception):
    """Invalid configuration; the message names the offending field."""


# --------------------------------------------------------------------------
# configuration handling


def bundled_config_names() -> list[str]:
    root = resources.files("ttlab") / "data" / "configs"
    return sorted(p.name[:-5].replace("_", "-") for p in root.iterdir() if p.name.endswith(".json"))


def bundled_config(name: str) -> dict:
    path = resources.files("ttlab") / "data" / "configs" / f"{name.replace('-', '_')}.json"
    return json.loads(path.read_text())


def load_config(path: str | None, task: str | None) -> dict:
    if path is None:
        if task is None:
            raise ValidationFailure("--config: required for 'run'")
        return bundled_config(task.replace("-", "_"))
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"--config: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise ValidationFailure(f"--config: cannot read {path!r} ({exc.strerror})") from exc
    if task is not None and isinstance(cfg, dict) and cfg.get("task") not in (None, task):
        raise ValidationFailure(f"task: config is for {cfg.get('task')!r}, not {task!r}")
    if isinstance(cfg, dict) and task is not None:
        cfg.setdefault("task", task)
    return cfg


def validate_config(cfg) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationFailure(f"{where}: {exc.message}") from exc


def _merge(name: str, flag, value, strict: bool, warnings: list):
    """Config values win over flags unless ``--strict`` turns a conflict into an error."""
    if flag is None:
        return value
    if value is None:
        return flag
    if value != flag:
        if strict:
            raise ValidationFailure(f"{name}: flag value {flag!r} conflicts with config value {value!r}")
        warnings.append(f"{name}: config value {value!r} overrides flag {flag!r}")
    return value


def build_strategy(cfg: dict, args, warnings: list) -> Strategy:
    s = dict(cfg.get("strategy", {}))
    max_bond = _merge("strategy.max_bond", args.max_bond, s.get("max_bond"), args.strict, warnings)
    tol = _merge("strategy.tolerance", args.tol, s.get("tolerance"), args.strict, warnings)
    kwargs = {}
    if "method" in s:
        kwargs["method"] = Method(s["method"])
    for key in ("simplification_tolerance", "max_sweeps", "normalize"):
        if key in s:
            kwargs[key] = s[key]
    if tol is not None:
        kwargs["tolerance"] = float(tol)
    if max_bond is not None:
        kwargs["max_bond"] = int(max_bond)
    return DEFAULT_STRATEGY.replace(**kwargs)


# --------------------------------------------------------------------------
# task helpers


def _mesh(cfg: dict):
    from .funcrep import Interval, Mesh

    if "mesh" not in cfg:
        raise ValidationFailure("mesh: required for this task")
    intervals = []
    for k, iv in enumerate(cfg["mesh"]["intervals"]):
        try:
            intervals.append(Interval.from_json(iv))
        except ValueError as exc:
            raise ValidationFailure(f"mesh/intervals/{k}: {exc}") from exc
    return Mesh(intervals, cfg["mesh"].get("order", "A"))


def _builtin(cfg: dict):
    if "function" not in cfg:
        raise ValidationFailure("function: required for this task")
    try:
        b = registry.lookup(cfg["function"]["name"])
        return b, b.params(cfg["function"].get("params"))
    except (KeyError, ValueError) as exc:
        raise ValidationFailure(str(exc).strip("'\"")) from exc


def load_function(cfg: dict, strategy: Strategy, seed: int) -> tuple[MPS, dict]:
    """Encode the configured builtin on the configured mesh."""
    from .funcrep import BlackBox, cross_interpolation

    mesh = _mesh(cfg)
    b, p = _builtin(cfg)
    method = cfg.get("method", "auto")
    if method not in ("auto", "closed_form", "tci"):
        raise ValidationFailure(f"method: {method!r} is not one of auto, closed_form, tci")
    iv = mesh.intervals[0]
    closed_ok = mesh.dimension == 1 and iv.regular and b.closed_form is not None
    if method == "closed_form" and not closed_ok:
        raise ValidationFailure("method: closed_form needs a 1-D regular mesh and a factory-backed function")
    info = {"method": "closed_form" if (method != "tci" and closed_ok) else "tci", "evaluations": 0}
    if info["method"] == "closed_form":
        return b.closed_form(iv, p), info
    bb = BlackBox.from_function(lambda x: b.evaluate(x, p), mesh)
    tol = float(cfg.get("tolerances", {}).get("tci", 1e-10))
    state, report = cross_interpolation(bb, "DMRG", strategy, tol=tol, seed=seed)
    info["evaluations"] = report.evaluations
    info["sweeps"] = report.sweeps
    info["validation_error"] = report.validation_error
    if not report.converged:
        info["warning"] = f"cross interpolation reached validation error {report.validation_error:.3e}"
    return state, info


def _sample_error(state: MPS, mesh, f, samples: int, seed: int) -> float:
    from .funcrep import mps_evaluate

    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(samples, mesh.sites))
    x = mesh.coordinates_from_bits(bits)
    return float(np.max(np.abs(mps_evaluate(state, bits) - f(x))))


def _hamiltonian(cfg: dict):
    from .hamiltonians import InteractionGraph, graph_to_mpo, heisenberg_nn, nn_hamiltonian, tfi_graph, tfi_nn

    if "hamiltonian" not in cfg:
        raise ValidationFailure("hamiltonian: required for this task")
    h = cfg["hamiltonian"]
    if "model" in h:
        N = int(h["N"])
        if h["model"] == "tfi":
            g, J = float(h.get("g", 1.0)), float(h.get("J", 1.0))
            return graph_to_mpo(tfi_graph(N, g, J)), tfi_nn(N, g, J), N
        nn = heisenberg_nn(N, float(h.get("J", 1.0)))
        return nn_hamiltonian(nn)[0], nn, N
    try:
        g = InteractionGraph.from_json(h)
    except (KeyError, ValueError, IndexError) as exc:
        raise ValidationFailure(f"hamiltonian: {exc}") from exc
    return graph_to_mpo(g), None, g.size


def _num(z) -> float | dict:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise NumericalError("non-finite result")
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z.real)):
        return float(z.real)
    return {"re": z.real, "im": z.imag}


def task_load(cfg, strategy, seed, out):
    t0 = time.perf_counter()
    state, info = load_function(cfg, strategy, seed)
    t1 = time.perf_counter()
    mesh = _mesh(cfg)
    b, p = _builtin(cfg)
    samples = int(cfg.get("output", {}).get("samples", 256))
    err = _sample_error(state, mesh, lambda x: b.evaluate(x, p), samples, seed)
    out.update(
        value=_num(np.sqrt(float(scprod(state, state).real))),
        values={"max_sample_error": err, "method": info["method"], "norm": float(np.sqrt(scprod(state, state).real))},
        bond_dimensions=state.bond_dimensions() or [1],
        evaluations=int(info["evaluations"]),
        error_estimate=float(state.error),
    )
    out["timings"].update(build_s=t1 - t0)
    if "warning" in info:
        out["warnings"].append(info["warning"])
    return state, mesh


def task_integrate(cfg, strategy, seed, out):
    from .calculus import integrate_mps, quadrature_mps

    state, mesh = task_load(cfg, strategy, seed, out)
    t0 = time.perf_counter()
    rule_name = cfg.get("rule", "trapezoidal")
    try:
        rules = [quadrature_mps(rule_name, iv) for iv in mesh.intervals]
    except ValueError as exc:
        raise ValidationFailure(f"rule: {exc}") from exc
    value = integrate_mps(state, rules, mesh.order)
    for r in rules:
        out["warnings"].extend(r.warnings)
    out["value"] = _num(value)
    out["values"]["rule"] = rule_name
    out["timings"]["integrate_s"] = time.perf_counter() - t0
    return state, mesh


def task_derive(cfg, strategy, seed, out):
    from .calculus import finite_differences_mpo, fourier_derivative_mpo

    state, mesh = task_load(cfg, strategy, seed, out)
    if mesh.dimension != 1 or not mesh.intervals[0].regular:
        raise ValidationFailure("mesh: derive needs a single regular interval")
    iv = mesh.intervals[0]
    d = cfg.get("derivative", {})
    kind, order = d.get("kind", "fd"), int(d.get("order", 1))
    t0 = time.perf_counter()
    if kind == "fd":
        if order not in (1, 2):
            raise ValidationFailure("derivative/order: finite differences support orders 1 and 2")
        op = finite_differences_mpo(order, int(d.get("accuracy", 2)), iv, d.get("boundary", "open"))
    else:
        op = fourier_derivative_mpo(order, iv)
    result = apply(op, state, strategy)
    out["timings"]["derive_s"] = time.perf_counter() - t0
    b, p = _builtin(cfg)
    vec = result.to_vector() if iv.n_qubits <= 20 else None
    if vec is not None and order == 1 and b.derivative is not None:
        x = iv.points()[:, None]
        exact = b.derivative(x, p)
        margin = 0 if kind == "fourier" or d.get("boundary") == "periodic" else int(d.get("accuracy", 2))
        sl = slice(margin, len(exact) - margin) if margin else slice(None)
        out["values"]["max_derivative_error"] = float(np.max(np.abs(vec[sl] - exact[sl])))
    out["bond_dimensions"] = result.bond_dimensions() or [1]
    out["error_estimate"] = float(result.error)
    out["values"]["derivative"] = {"kind": kind, "order": order}
    return result, mesh


def _second_difference(n: int, shift: float):
    from .calculus import mpo_weighted_shifts

    return mpo_weighted_shifts(n, {0: shift + 2.0, 1: -1.0, -1: -1.0}, "open")


def task_solve_linear(cfg, strategy, seed, out):
    from .lapack import cg_solve, dmrg_solve, gmres_solve, residual_norm
    from .lapack.solve import BICGSTAB

    lin = cfg.get("linear", {})
    n = int(lin.get("qubits", 8))
    A = _second_difference(n, float(lin.get("shift", 1.0)))
    mesh_cfg = dict(cfg)
    mesh_cfg.setdefault("mesh", {"intervals": [{"kind": "regular_half_open", "a": 0.0, "b": 1.0, "qubits": n}]})
    mesh_cfg.setdefault("function", {"name": "sin", "params": {"k": 2 * np.pi}})
    mesh_cfg["method"] = "auto"
    b, _ = load_function(mesh_cfg, strategy, seed)
    if len(b) != n:
        raise ValidationFailure("mesh: right-hand side must have linear.qubits sites")
    method = cfg.get("method", "cg")
    tol = float(cfg.get("tolerances", {}).get("solver", 1e-10))
    maxiter = int(cfg.get("max_iterations", 200))
    t0 = time.perf_counter()
    if method == "cg":
        x, res, rep = cg_solve(A, b, None, strategy, maxiter=maxiter, tol=tol)
    elif method == "bicgstab":
        x, res, rep = cg_solve(A, b, None, strategy, maxiter=maxiter, tol=tol, variant=BICGSTAB)
    elif method == "gmres":
        x, res, rep = gmres_solve(A, b, None, strategy, maxiter=maxiter, tol=tol)
    elif method == "dmrg":
        x, res, rep = dmrg_solve(A, b, None, strategy, maxiter=maxiter, tol=tol)
    else:
        raise ValidationFailure(f"method: unknown linear solver {method!r}")
    out["timings"]["solve_s"] = time.perf_counter() - t0
    nb = float(np.sqrt(scprod(b, b).real))
    res = residual_norm(A, x, b)
    out.update(
        value=_num(res / nb),
        values={"residual": float(res), "rhs_norm": nb, "iterations": rep.iterations,
                "matvecs": rep.matvecs, "method": method},
        bond_dimensions=x.bond_dimensions() or [1],
        error_estimate=float(x.error),
    )
    if not rep.converged:
        out["status"] = "not_converged"
    return x, None


def task_solve_eig(cfg, strategy, seed, out):
    from .lapack import arnoldi_eigh, dmrg_min_eigen, gradient_descent, power_method

    H, _, N = _hamiltonian(cfg)
    guess = random_uniform_mps(N, 2, 2, seed=seed)
    method = cfg.get("method", "dmrg")
    maxiter = cfg.get("max_iterations")
    t0 = time.perf_counter()
    if method == "dmrg":
        E, state, rep = dmrg_min_eigen(H, guess, strategy, maxiter=int(maxiter or 20))
    elif method == "arnoldi":
        E, state, rep = arnoldi_eigh(H, guess, window=8, maxiter=int(maxiter or 200), strategy=strategy)
    elif method == "gradient":
        E, state, rep = gradient_descent(H, guess, strategy, maxiter=int(maxiter or 500))
    elif method == "power":
        E, state, rep = power_method(H, guess, strategy, maxiter=int(maxiter or 500))
    else:
        raise ValidationFailure(f"method: unknown eigensolver {method!r}")
    out["timings"]["solve_s"] = time.perf_counter() - t0
    out.update(
        value=_num(E),
        values={"iterations": rep.iterations, "matvecs": rep.matvecs, "method": method,
                "converged": bool(rep.converged)},
        bond_dimensions=state.bond_dimensions() or [1],
        error_estimate=float(state.error),
    )
    if N <= 12:
        out["values"]["dense_reference"] = float(np.linalg.eigvalsh(mpo_to_dense(H))[0])
    out["warnings"].extend(rep.warnings)
    return state, None


def _initial_state(kind: str, N: int, seed: int) -> MPS:
    if kind == "up":
        return product_state([[1.0, 0.0]] * N)
    if kind == "plus":
        return product_state([[2**-0.5, 2**-0.5]] * N)
    v = canonicalize(random_uniform_mps(N, 2, 2, seed=seed), 0)
    return v * (1.0 / v.norm())


def task_evolve(cfg, strategy, seed, out):
    from . import evolution as ev

    H, nn, N = _hamiltonian(cfg)
    e = cfg.get("evolution", {"dt": 0.01, "t_final": 0.1})
    spec = ev.EvolutionSpec(e.get("mode", "real"), float(e["dt"]), float(e["t_final"]), strategy,
                            normalize=e.get("mode") == "imaginary")
    v0 = _initial_state(e.get("initial", "up"), N, seed)
    method = cfg.get("method", "tdvp")
    tols = e.get("tolerances", {})
    t0 = time.perf_counter()
    extra = {}
    if method in ("euler", "euler2", "rk4"):
        state = ev.evolve(lambda Hm, v, s: ev.explicit_step(method, Hm, v, s), H, v0, spec)
    elif method == "rkf":
        state, acc, rej = ev.rkf_evolve(H, v0, spec, tol_step=float(tols.get("step", 1e-8)))
        extra = {"accepted_steps": acc, "rejected_steps": rej}
    elif method == "cn":
        state = ev.evolve(ev.crank_nicolson_step, H, v0, spec, solver_tol=float(tols.get("solver", 1e-12)))
    elif method == "tdvp":
        state = ev.evolve(ev.tdvp_step, H, v0, spec)
    elif method in ("trotter2", "trotter3"):
        if nn is None:
            raise ValidationFailure("hamiltonian: Trotter methods need a nearest-neighbour model")
        order = int(method[-1])
        state = ev.evolve(lambda Hm, v, s: ev.trotter_step(nn, v, s, order), H, v0, spec)
    else:
        raise ValidationFailure(f"method: unknown evolution method {method!r}")
    out["timings"]["evolve_s"] = time.perf_counter() - t0
    norm2 = float(scprod(state, state).real)
    obs = {}
    Z = np.diag([1.0, -1.0])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    for name in e.get("observables", ["energy", "norm"]):
        if name == "energy":
            obs["energy"] = float(expectation_mpo(H, state).real / norm2)
        elif name == "norm":
            obs["norm"] = float(np.sqrt(norm2))
        elif name in ("sz", "sx"):
            op = Z if name == "sz" else X
            obs[name] = [float(expectation_local(state, op, i).real / norm2) for i in range(N)]
    out.update(value=obs.get("energy", float(np.sqrt(norm2))), values={**obs, **extra, "method": method},
               bond_dimensions=state.bond_dimensions() or [1], error_estimate=float(state.error))
    return state, None


def task_qft(cfg, strategy, seed, out):
    from .lapack import qft, qft_flip

    state, mesh = task_load(cfg, strategy, seed, out)
    t0 = time.perf_counter()
    spectrum = qft_flip(qft(state, strategy))
    out["timings"]["qft_s"] = time.perf_counter() - t0
    n = len(state)
    if n <= 16:
        ref = np.fft.fft(state.to_vector()) / np.sqrt(2**n)
        out["values"]["max_dft_deviation"] = float(np.max(np.abs(spectrum.to_vector() - ref)))
    out["bond_dimensions"] = spectrum.bond_dimensions() or [1]
    out["error_estimate"] = float(spectrum.error)
    return spectrum, mesh


def task_bench(cfg, strategy, seed, out):
    from .bench import run_bench, rows_to_csv

    b = cfg.get("bench", {})
    t0 = time.perf_counter()
    rows = run_bench(b.get("suites", ["blas"]), b.get("sizes", [8, 12]), b.get("chis", [4, 16]),
                     int(b.get("repetitions", 5)), seed)
    out["timings"]["bench_s"] = time.perf_counter() - t0
    out["rows"] = [r.as_json() for r in rows]
    out["value"] = len(rows)
    out["_csv"] = rows_to_csv(rows)
    return None, None


TASK_RUNNERS = {
    "load": task_load,
    "integrate": task_integrate,
    "derive": task_derive,
    "solve-eig": task_solve_eig,
    "solve-linear": task_solve_linear,
    "evolve": task_evolve,
    "qft": task_qft,
    "bench": task_bench,
}


def _samples_csv(state: MPS | None, mesh, limit: int) -> str | None:
    if state is None or len(state) > 20:
        return None
    vec = state.to_vector()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    dims = mesh.dimension if mesh is not None else 0
    w.writerow(["index"] + [f"x{k}" for k in range(dims)] + ["re", "im"])
    step = max(1, len(vec) // max(limit, 1))
    for i in range(0, len(vec), step):
        row = [i]
        if mesh is not None:
            bits = [(i >> (mesh.sites - 1 - k)) & 1 for k in range(mesh.sites)]
            row += [float(c) for c in mesh.coordinates_from_bits(np.array([bits]))[0]]
        w.writerow(row + [float(vec[i].real), float(vec[i].imag)])
    return buf.getvalue()


def execute(cfg: dict, args) -> dict:
    """Validate and run one configuration; returns the result document."""
    validate_config(cfg)
    warnings: list[str] = []
    seed = _merge("seed", args.seed, cfg.get("seed"), args.strict, warnings)
    seed = 0 if seed is None else int(seed)
    strategy = build_strategy(cfg, args, warnings)
    out = {"schema": SCHEMA_VERSION, "task": cfg["task"], "status": "ok", "seed": seed,
           "timings": {}, "warnings": warnings, "backend": BACKEND}
    t0 = time.perf_counter()
    state, mesh = TASK_RUNNERS[cfg["task"]](cfg, strategy, seed, out)
    out["timings"]["total_s"] = time.perf_counter() - t0
    csv_text = out.pop("_csv", None)
    if csv_text is None and (cfg.get("output", {}).get("csv") or args.format == "csv"):
        csv_text = _samples_csv(state, mesh, int(cfg.get("output", {}).get("samples", 64)))
    jsonschema.validate(out, RESULT_SCHEMA)
    out_dir = args.out or cfg.get("output", {}).get("dir")
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / "result.json").write_text(dumps(out) + "\n")
        if csv_text:
            (d / ("bench.csv" if cfg["task"] == "bench" else "samples.csv")).write_text(csv_text)
    if csv_text is not None:
        out["_csv"] = csv_text
    return out


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON configuration file (default: bundled config for the task)")
    p.add_argument("--seed", type=int, default=None, help="random seed (u64)")
    p.add_argument("--out", default=None, help="directory for result.json and CSV files")
    p.add_argument("--format", choices=["json", "csv"], default="json", help="stdout format")
    p.add_argument("--max-bond", type=int, default=None, dest="max_bond")
    p.add_argument("--tol", type=float, default=None, help="relative singular-value cutoff")
    p.add_argument("--strict", action="store_true", help="reject flags that conflict with the config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttlab", description="Tensor-train numerics from JSON configs.")
    parser.add_argument("--version", action="version", version=f"ttlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run the task named in --config")
    _common(p)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run a {task} configuration")
        _common(p)
    p = sub.add_parser("configs", help="list bundled configurations")
    return parser


def _emit_error(status: str, message: str, code: int) -> int:
    doc = {"schema": SCHEMA_VERSION, "status": status, "message": message}
    print(dumps(doc), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    if args.command == "configs":
        print("\n".join(bundled_config_names()))
        return EXIT_OK
    threads = os.environ.get("TTLAB_THREADS")
    try:
        limit = int(threads) if threads else None
        if limit is not None and limit < 1:
            raise ValueError
    except ValueError:
        return _emit_error("validation_error", f"TTLAB_THREADS: expected a positive integer, got {threads!r}",
                           EXIT_VALIDATION)
    try:
        with threadpool_limits(limits=limit), np.errstate(over="ignore", invalid="ignore"):
            cfg = load_config(args.config, None if args.command == "run" else args.command)
            out = execute(cfg, args)
    except ValidationFailure as exc:
        return _emit_error("validation_error", str(exc), EXIT_VALIDATION)
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return _emit_error("numerical_error", f"{type(exc).__name__}: {exc}", EXIT_NUMERICAL)
    except (TTError, ValueError) as exc:
        return _emit_error("validation_error", f"{type(exc).__name__}: {exc}", EXIT_VALIDATION)
    csv_text = out.pop("_csv", None)
    if args.format == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        print(dumps(out))
    return EXIT_OK if out["status"] == "ok" else EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
