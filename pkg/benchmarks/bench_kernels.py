"""Compare the compiled kernel backend against the pure-numpy fallback.

Kernel microbenchmarks run both implementations in-process; the macro rows
(forest fit, exact Shapley) re-invoke this script in a subprocess with
SHAPEQC_BACKEND pinned, since the backend is chosen at import time.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from shapeqc._kernels import BACKEND, _pure
from shapeqc._kernels import gini_best_split, newton_best_split, tree_apply
from shapeqc.numeric import rng_from_seed


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases():
    rng = rng_from_seed(0)
    X = np.ascontiguousarray(rng.normal(size=(4000, 14)))
    y = (rng.random(4000) < 0.5).astype(np.int64)
    g = rng.normal(size=4000)
    h = rng.random(4000) * 0.25

    feature = np.array([0, 2, -1, -1, -1], dtype=np.int32)
    threshold = np.array([0.0, 0.5, 0.0, 0.0, 0.0])
    left = np.array([1, 2, -1, -1, -1], dtype=np.int32)
    right = np.array([4, 3, -1, -1, -1], dtype=np.int32)
    T = np.ascontiguousarray(rng.normal(size=(200000, 14)))

    return [
        ("gini_best_split   4000x14", lambda k: k[0](X, y)),
        ("newton_best_split 4000x14", lambda k: k[1](X, g, h)),
        ("tree_apply      200000x14", lambda k: k[2](feature, threshold, left, right, T)),
    ]


def run_macro(repeat: int) -> dict:
    """Timed in the current backend; invoked per backend via subprocess."""
    from shapeqc import BackgroundSet, fit, shapley_exact

    rng = rng_from_seed(1)
    X = rng.normal(size=(800, 14))
    y = (X[:, 2] + 0.5 * rng.normal(size=800) > 0).astype(np.int64)

    t_fit = timeit(lambda: fit("random_forest", X, y, seed=3), repeat)

    model = fit("random_forest", X, y, seed=3)
    bg = BackgroundSet.from_rows(X, n=32, seed=0)
    x = X[0]
    t_shap = timeit(lambda: shapley_exact(model, x, bg), repeat)
    return {"random_forest fit 800x14": t_fit, "exact shapley 1 instance": t_shap}


def macro_in_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ, SHAPEQC_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--macro", "--repeat", str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--macro", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.macro:
        print(json.dumps(run_macro(args.repeat)))
        return 0

    if BACKEND != "compiled":
        print("note: compiled extension not built; comparing pure against itself")

    compiled_kernels = (gini_best_split, newton_best_split, tree_apply)
    pure_kernels = (_pure.gini_best_split, _pure.newton_best_split, _pure.tree_apply)

    print(f"{'case':30s} {'compiled':>12s} {'pure':>12s} {'speedup':>9s}")
    for name, call in kernel_cases():
        tc = timeit(lambda: call(compiled_kernels), args.repeat)
        tp = timeit(lambda: call(pure_kernels), args.repeat)
        print(f"{name:30s} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tc:8.2f}x")

    mc = macro_in_backend("compiled" if BACKEND == "compiled" else "pure", args.repeat)
    mp = macro_in_backend("pure", args.repeat)
    for name in mc:
        tc, tp = mc[name], mp[name]
        print(f"{name:30s} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tc:8.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
