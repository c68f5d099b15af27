"""Compiled vs numpy kernels: timings and agreement.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from pmechanics import _kernels
from pmechanics.clifford import Metric, dense_table


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    n = 48
    k1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    k2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    yield "twisted_convolution_direct 48^2", lambda mod: mod.twisted_convolution_direct(k1, k2, 0.1, 0.1, 0.7, 1)

    index, factor = dense_table(Metric.from_signature(1, 3))
    a = rng.standard_normal((4096, 16))
    b = rng.standard_normal((4096, 16))
    yield "clifford_product_dense 4096 x Cl(1,3)", lambda mod: mod.clifford_product_dense(a, b, index, factor)

    m = 512
    q = np.cos(2 * np.pi * np.arange(m) / m)
    p0 = np.zeros(m)
    p1 = (np.roll(q, -1) - q) / (-0.05)
    yield "kg_leapfrog 512 sites x 2000 steps", lambda mod: mod.kg_leapfrog(q, p0, p1, 1.0, -1.0, 1.0, 0.025, 0.05, 2000, 50)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.compiled is None:
        print("compiled kernels are not built; only the numpy fallback is available")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':42s} {'cython [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for name, call in cases(rng):
        tc, rc = best_of(lambda: call(_kernels.compiled), args.repeat)
        tp, rp = best_of(lambda: call(_kernels.python), args.repeat)
        rc = rc if isinstance(rc, tuple) else (rc,)
        rp = rp if isinstance(rp, tuple) else (rp,)
        diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y)))) for x, y in zip(rc, rp))
        print(f"{name:42s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
