#!/usr/bin/env python3
"""Compare the compiled and pure-Python tridiagonal kernels.

Times LDL^T factorization, factored solves, and matvecs on random SPD
tridiagonal systems at several sizes, then an end-to-end spectrum solve
in a subprocess per backend (the backend is fixed at import time, so a
fresh interpreter is the only clean way to switch).

Usage: python3 benchmarks/bench_backends.py [--sizes 1000,10000,40000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from langhom.backends import _fallback

try:
    from langhom.backends import _speedups
except ImportError:
    _speedups = None


def random_spd(n, rng):
    off = rng.uniform(-1.0, 1.0, n - 1)
    # Row diagonal dominance keeps every pivot positive.
    diag = np.abs(rng.uniform(1.0, 2.0, n))
    diag[:-1] += np.abs(off)
    diag[1:] += np.abs(off)
    return diag, off


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_kernels(sizes):
    rng = np.random.default_rng(20240901)
    backends = [("python", _fallback)]
    if _speedups is not None:
        backends.append(("cython", _speedups))
    print(f"{'n':>8} {'kernel':<10}" + "".join(f"{name:>12}"
                                               for name, _ in backends)
          + f"{'speedup':>10}")
    for n in sizes:
        diag, off = random_spd(n, rng)
        rhs = rng.standard_normal(n)
        rows = {"factor": [], "solve": [], "matvec": []}
        factored = {}
        for name, mod in backends:
            t, out = time_call(mod.factor_spd_tridiagonal, diag, off)
            factored[name] = out
            rows["factor"].append(t)
            piv, sub = out
            t, _ = time_call(mod.solve_factored, piv, sub, rhs)
            rows["solve"].append(t)
            t, _ = time_call(mod.tridiagonal_matvec, diag, off, rhs)
            rows["matvec"].append(t)
        if len(backends) == 2:
            ref = _fallback.solve_factored(*factored["python"], rhs)
            alt = _speedups.solve_factored(*factored["cython"], rhs)
            err = float(np.max(np.abs(ref - alt)))
            assert err < 1e-12 * max(1.0, float(np.max(np.abs(ref)))), err
        for kernel, times in rows.items():
            speedup = times[0] / times[1] if len(times) == 2 else float("nan")
            cells = "".join(f"{t * 1e3:>10.3f}ms" for t in times)
            print(f"{n:>8} {kernel:<10}{cells}{speedup:>9.1f}x")


_E2E_SNIPPET = """
import time
import langhom as lh

model = lh.make_ou_cosine_model(1.0)
coeffs = lh.solve_cell(model)
grid = lh.build_grid(5.0, 0.0025)
dens = lh.eval_rho(model, 0.05, 5.0)
t0 = time.perf_counter()
pairs = lh.solve_spectrum(dens.rho_ms, model.sigma, grid, 5)
dt = time.perf_counter() - t0
print(f"{lh.backend_name()}: spectrum n={grid.n_nodes} in {dt:.3f}s, "
      f"lambda_1={pairs[1].value:.9f}")
"""


def bench_end_to_end():
    print("\nend-to-end spectrum solve (fresh interpreter per backend):")
    sys.stdout.flush()  # keep parent output ahead of subprocess output
    names = ["python"] + (["cython"] if _speedups is not None else [])
    for name in names:
        env = dict(os.environ, LANGHOM_BACKEND=name)
        subprocess.run([sys.executable, "-c", _E2E_SNIPPET], env=env,
                       check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1000,10000,40000",
                        help="comma-separated system sizes")
    parser.add_argument("--skip-e2e", action="store_true")
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]

    if _speedups is None:
        print("compiled backend not available; timing pure Python only")
    bench_kernels(sizes)
    if not args.skip_e2e:
        bench_end_to_end()


if __name__ == "__main__":
    main()
