"""Compare the compiled and pure-NumPy contraction kernels.

Usage::

    python benchmarks/bench_kernels.py [--sizes 8 12 16] [--chis 4 16 64] [--reps 20] [--csv out.csv]

Every kernel is timed on both backends with identical inputs; the last
column is the speed-up of the compiled backend over the NumPy one.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from ttlab.bench import time_call
from ttlab.core import random_uniform_mps
from ttlab.kernels import backends


def cases(n: int, chi: int, seed: int = 0):
    u = random_uniform_mps(n, 2, chi, seed=seed, complex_values=True)
    v = random_uniform_mps(n, 2, chi, seed=seed + 1, complex_values=True)
    bra = [np.ascontiguousarray(t) for t in u.tensors]
    ket = [np.ascontiguousarray(t) for t in v.tensors]
    A, B = bra[n // 2], ket[n // 2]
    rng = np.random.default_rng(seed)
    El = rng.normal(size=(A.shape[0], B.shape[0])) + 0j
    Er = rng.normal(size=(A.shape[2], B.shape[2])) + 0j
    s = np.sort(rng.random(4 * chi))[::-1].copy()
    return {
        "scprod": lambda m: m.scprod(bra, ket),
        "env_left": lambda m: m.env_left(El, A, B),
        "env_right": lambda m: m.env_right(Er, A, B),
        "truncation_rank": lambda m: m.truncation_rank(s, 1e-3, chi),
    }


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[8, 12, 16])
    p.add_argument("--chis", type=int, nargs="+", default=[4, 16, 64])
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--csv", default=None, help="also write the table to this file")
    args = p.parse_args(argv)

    mods = backends()
    if "compiled" not in mods:
        print("compiled extension not built; only the NumPy backend is available", file=sys.stderr)
    header = ["kernel", "n", "chi"] + [f"{name}_us" for name in sorted(mods)] + ["speedup"]
    rows = []
    for n in args.sizes:
        for chi in args.chis:
            for kernel, fn in cases(n, chi).items():
                med = {}
                for name, mod in sorted(mods.items()):
                    times, _ = time_call(lambda: fn(mod), args.reps)
                    med[name] = float(np.median(times))
                speedup = med["python"] / med["compiled"] if "compiled" in med else float("nan")
                rows.append([kernel, n, chi] + [f"{med[k]:.2f}" for k in sorted(med)] + [f"{speedup:.2f}"])

    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(x).rjust(w) for x, w in zip(r, widths)))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows([header] + rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
