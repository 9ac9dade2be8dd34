"""Time the compiled and pure-Python glasso kernels on the same problems.

    python benchmarks/bench_kernels.py [--dims 20 50 100] [--repeat 3]
"""
import argparse
import time

import numpy as np

from lvglasso import _cd_py, glasso
from lvglasso.glasso import glasso_masked, lvglasso_mask

try:
    from lvglasso import _cd_fast
except ImportError:
    _cd_fast = None


def problem(d, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((2 * d, d)) @ (np.eye(d) + 0.5 * rng.standard_normal((d, d)) / np.sqrt(d))
    W = X.T @ X / X.shape[0]
    off = np.abs(W - np.diag(np.diag(W))).max()
    return W, lvglasso_mask(d, 0, 0.2 * off)


def timeit(kernels, W, mask, repeat):
    glasso.kernels = kernels
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        sol = glasso_masked(W, mask)
        best = min(best, time.perf_counter() - t0)
    return best, sol


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[20, 50, 100])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _cd_fast is None:
        print("compiled kernel not built; timing the pure-Python fallback only")
    print(f"{'dim':>5} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max |dK|':>10}")
    for d in args.dims:
        W, mask = problem(d)
        tp, sp = timeit(_cd_py, W, mask, args.repeat)
        if _cd_fast is None:
            print(f"{d:5d} {tp:11.4f} {'-':>11} {'-':>8} {'-':>10}")
            continue
        tc, sc = timeit(_cd_fast, W, mask, args.repeat)
        diff = np.abs(sp.precision - sc.precision).max()
        print(f"{d:5d} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
