"""Micro-benchmarks of the contraction kernels and the main algorithms."""

from __future__ import annotations

import csv
import io
import time
import tracemalloc
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .blas import apply
from .core import MPO, Method, Strategy, random_uniform_mps

CSV_COLUMNS = ("kernel", "n", "chi", "median_us", "p90_us")
SUITES = ("blas", "solvers", "qft", "tci")


@dataclass
class BenchRow:
    kernel: str
    n: int
    chi: int
    median_us: float
    p90_us: float
    samples_us: list = field(default_factory=list)
    alloc_peak_bytes: int = 0

    def as_csv(self) -> dict:
        return {"kernel": self.kernel, "n": self.n, "chi": self.chi,
                "median_us": f"{self.median_us:.3f}", "p90_us": f"{self.p90_us:.3f}"}

    def as_json(self) -> dict:
        return {"kernel": self.kernel, "n": self.n, "chi": self.chi, "median_us": self.median_us,
                "p90_us": self.p90_us, "alloc_peak_bytes": self.alloc_peak_bytes,
                "spread_us": float(np.std(self.samples_us)) if self.samples_us else 0.0}


def time_call(fn: Callable[[], object], repetitions: int = 5) -> tuple[list[float], int]:
    """Wall times in microseconds plus the traced allocation peak of one extra call."""
    fn()  # warm-up
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e6)
    tracemalloc.start()
    try:
        fn()
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return times, int(peak)


def _row(kernel: str, n: int, chi: int, fn, repetitions: int) -> BenchRow:
    times, peak = time_call(fn, repetitions)
    return BenchRow(kernel, n, chi, float(np.median(times)), float(np.percentile(times, 90)), times, peak)


def _random_mpo(n: int, chi: int, seed: int) -> MPO:
    rng = np.random.default_rng(seed)
    ts = []
    for k in range(n):
        a = 1 if k == 0 else chi
        b = 1 if k == n - 1 else chi
        ts.append((rng.uniform(-1, 1, (a, 2, 2, b)) / np.sqrt(2 * chi)).astype(np.complex128))
    return MPO(ts)


def bench_blas(sizes: Sequence[int], chis: Sequence[int], repetitions: int, seed: int = 0) -> list[BenchRow]:
    rows = []
    mods = kernels.backends()
    for n in sizes:
        for chi in chis:
            u = random_uniform_mps(n, 2, chi, seed=seed)
            v = random_uniform_mps(n, 2, chi, seed=seed + 1)
            bra = [np.ascontiguousarray(t) for t in u.tensors]
            ket = [np.ascontiguousarray(t) for t in v.tensors]
            A = np.ascontiguousarray(u.tensors[n // 2])
            B = np.ascontiguousarray(v.tensors[n // 2])
            E = np.ascontiguousarray(np.ones((A.shape[0], B.shape[0]), dtype=np.complex128))
            for name, mod in sorted(mods.items()):
                rows.append(_row(f"scprod[{name}]", n, chi, lambda m=mod: m.scprod(bra, ket), repetitions))
                rows.append(_row(f"env_left[{name}]", n, chi, lambda m=mod: m.env_left(E, A, B), repetitions))
            op = _random_mpo(n, 2, seed)
            strategy = Strategy(max_bond=chi)
            rows.append(_row("apply+simplify", n, chi, lambda: apply(op, v, strategy), repetitions))
    return rows


def bench_solvers(sizes: Sequence[int], chis: Sequence[int], repetitions: int, seed: int = 0) -> list[BenchRow]:
    from .hamiltonians import tfi_mpo
    from .lapack import dmrg_min_eigen

    rows = []
    for n in sizes:
        H = tfi_mpo(n, 1.0)
        guess = random_uniform_mps(n, 2, 2, seed=seed)
        for chi in chis:
            strategy = Strategy(method=Method.SVD_TRUNCATE, max_bond=chi)
            rows.append(_row("dmrg", n, chi, lambda: dmrg_min_eigen(H, guess, strategy, maxiter=2), repetitions))
    return rows


def bench_qft(sizes: Sequence[int], chis: Sequence[int], repetitions: int, seed: int = 0) -> list[BenchRow]:
    from .lapack import qft

    rows = []
    for n in sizes:
        for chi in chis:
            v = random_uniform_mps(n, 2, chi, seed=seed)
            strategy = Strategy(max_bond=max(chi, 8))
            rows.append(_row("qft", n, chi, lambda: qft(v, strategy), repetitions))
    return rows


def bench_tci(sizes: Sequence[int], chis: Sequence[int], repetitions: int, seed: int = 0) -> list[BenchRow]:
    from .funcrep import BlackBox, cross_interpolation

    rows = []
    for n in sizes:
        for chi in chis:
            hidden = random_uniform_mps(n, 2, chi, seed=seed)

            def run(h=hidden):
                cross_interpolation(BlackBox.from_mps(h), "DMRG", max_sweeps=3, validation_samples=100)

            rows.append(_row("tci", n, chi, run, repetitions))
    return rows


_RUNNERS = {"blas": bench_blas, "solvers": bench_solvers, "qft": bench_qft, "tci": bench_tci}


def run_bench(
    suites: Iterable[str] = ("blas",),
    sizes: Sequence[int] = (8, 12),
    chis: Sequence[int] = (4, 16),
    repetitions: int = 5,
    seed: int = 0,
) -> list[BenchRow]:
    rows = []
    for s in suites:
        if s not in _RUNNERS:
            raise ValueError(f"unknown bench suite {s!r}")
        rows.extend(_RUNNERS[s](list(sizes), list(chis), int(repetitions), seed))
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()
