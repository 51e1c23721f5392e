"""Time the compiled and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from slrr import kernels


def _inputs(n, d, seed=0):
    rng = np.random.default_rng(seed)
    X = np.abs(rng.standard_normal((n, d)))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    V = np.empty((n, d, n))
    kernels.get_backend("python").tangent_factors(X, V, 0, n)
    Q = np.empty((n, n, n))
    kernels.get_backend("python").gram_from_factors(V, Q, 0, n)
    W = np.full((n, n), 1.0 / n)
    gw = np.ascontiguousarray(rng.random((n, n)))
    return X, V, Q, W, gw


def _cases(mod, n, X, V, Q, W, gw):
    d = X.shape[1]
    outV, outQ, outG = np.empty((n, d, n)), np.empty((n, n, n)), np.empty((n, n))
    y = np.zeros(n)
    return {
        "tangent_factors": lambda: mod.tangent_factors(X, outV, 0, n),
        "gram_from_factors": lambda: mod.gram_from_factors(V, outQ, 0, n),
        "quad_form_sum": lambda: mod.quad_form_sum(Q, W),
        "gradient": lambda: mod.gradient(Q, W, y, 1.0, 0.01, gw, outG),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"backends available: {', '.join(kernels.AVAILABLE)}")
    print(f"{'kernel':<18}{'n':>6}" + "".join(f"{b + ' ms':>14}" for b in kernels.AVAILABLE)
          + ("   speedup" if len(kernels.AVAILABLE) > 1 else ""))
    for n in args.sizes:
        data = _inputs(n, args.dim)
        per = {b: _cases(kernels.get_backend(b), n, *data) for b in kernels.AVAILABLE}
        for name in per[kernels.AVAILABLE[0]]:
            times = {b: min(timeit.repeat(per[b][name], number=1, repeat=args.repeat)) * 1e3
                     for b in kernels.AVAILABLE}
            row = f"{name:<18}{n:>6}" + "".join(f"{times[b]:>14.3f}" for b in kernels.AVAILABLE)
            if len(times) > 1:
                row += f"{times['python'] / times['cython']:>9.2f}x"
            print(row)


if __name__ == "__main__":
    main()
