"""Compare the compiled and numpy fermionic kernels.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeat R]
"""
import argparse
import time

import numpy as np

from corrwork import fermions as fm
from corrwork import kernels


def bench(fn, X, args, repeat):
    fn(X, *args)  # warm-up
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn(X, *args)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()

    model = fm.FermionModel(1.0, 0.5, 0.25, 0.3)
    tau = fm.thermal_params(model)
    W = 0.3 * fm.w_min(model).value
    args = (model.omega, model.eps_even, model.eps_odd, model.temperature,
            tau.linear(), fm.thermal_free_energy(model), W)
    rng = np.random.default_rng(0)
    X = rng.uniform([0, -1, -1, -1, -1], [1, 1, 1, 1, 1], size=(opts.points, 5))

    print(f"active backend: {kernels.BACKEND}")
    # pattern-search polls are ~10 points; grid screening is one large batch
    for batch in (10, opts.points):
        times = {}
        for name, fn in kernels.AVAILABLE.items():
            times[name] = bench(fn, X[:batch], args, opts.repeat)
            print(f"{name:>7}: {times[name] * 1e6 / batch:9.2f} us/point (batch {batch})")
        if len(times) == 2:
            print(f"  speedup {times['python'] / times['cython']:.1f}x")
    if len(kernels.AVAILABLE) == 2:
        ref = kernels.AVAILABLE["python"](X, *args)[0]
        fast = kernels.AVAILABLE["cython"](X, *args)[0]
        print(f"max |dI| between backends: {np.max(np.abs(ref - fast)):.2e}")

    t = time.perf_counter()
    fm.maximize_correlations(model, W)
    print(f"one maximize_correlations call ({kernels.BACKEND}): "
          f"{(time.perf_counter() - t) * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
