"""Time the numpy and numba batch kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeats 7]

The numba column excludes JIT compilation (one warmup call per kernel).
The scalar column times the object-level NestedDual path on a small slice
and scales it up, for a sense of what the batch layer buys.
"""

import argparse
import time

import numpy as np

from nestad import _kernels
from nestad.functions import SIN, lift_nested
from nestad.nested import NestedDual, sa_mul


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    a = rng.uniform(0.5, 2.0, (args.n, 4))
    b = rng.uniform(0.5, 2.0, (args.n, 4))
    x = a[:, 0]
    f, d1, d2 = (g(x) for g in SIN.array)

    cases = {
        "nested_mul": (a, b),
        "nested_inv": (a,),
        "nested_lift": (a, f, d1, d2),
        "dual_mul": (np.ascontiguousarray(a[:, :2]), np.ascontiguousarray(b[:, :2])),
    }

    small = [NestedDual.from_tuple(r) for r in a[:10_000]]
    small_b = [NestedDual.from_tuple(r) for r in b[:10_000]]
    scalar = {
        "nested_mul": lambda: [sa_mul(p, q) for p, q in zip(small, small_b)],
        "nested_lift": lambda: [lift_nested(SIN, p) for p in small],
    }

    print(f"n = {args.n:,}, best of {args.repeats}")
    print(f"{'kernel':<12} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8} {'scalar ms':>10}")
    for name, inputs in cases.items():
        t_np = best_of(lambda: _kernels.NUMPY[name](*inputs), args.repeats)
        if _kernels.HAVE_NUMBA:
            _kernels.NUMBA[name](*inputs)  # compile
            t_nb = best_of(lambda: _kernels.NUMBA[name](*inputs), args.repeats)
            nb, ratio = f"{t_nb * 1e3:10.2f}", f"{t_np / t_nb:8.2f}"
        else:
            nb, ratio = f"{'n/a':>10}", f"{'n/a':>8}"
        sc = f"{'':>10}"
        if name in scalar:
            sc = f"{best_of(scalar[name], 1) * args.n / len(small) * 1e3:10.0f}"
        print(f"{name:<12} {t_np * 1e3:10.2f} {nb} {ratio} {sc}")


if __name__ == "__main__":
    main()
