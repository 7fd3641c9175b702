"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times LP column pricing (scan of all 2^d - 1 binary columns) and
co-exceedance counting on a 10^6 x 4 rank matrix, for every available
backend, and checks the backends agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from tailcompat import _pykernels
from tailcompat.estimator import ranks

try:
    from tailcompat import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_pricing(backends, dims, repeat, rng):
    print("pricing: first column with positive reduced cost (worst case: none)")
    for d in dims:
        y = -rng.random((d, d))  # all reduced costs negative -> full scan
        y = np.ascontiguousarray((y + y.T) / 2)
        row = [f"  d={d:2d} cols={2**d - 1:>8d}"]
        results = {}
        for name, mod in backends.items():
            t, results[name] = _best(lambda: mod.first_entering_column(y, d, 1e-11), repeat)
            row.append(f"{name}={t * 1e3:8.2f} ms")
        assert len(set(results.values())) == 1, results
        print("  ".join(row))


def bench_counts(backends, n, d, k, repeat, rng):
    r = np.ascontiguousarray(ranks(rng.random((n, d))))
    row = [f"counts: n={n} d={d} k={k}"]
    results = {}
    for name, mod in backends.items():
        t, results[name] = _best(lambda: mod.coexceedance_counts(r, k), repeat)
        row.append(f"{name}={t * 1e3:8.2f} ms")
    ref = next(iter(results.values()))
    assert all(np.array_equal(ref, v) for v in results.values())
    print("  ".join(row))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--dims", type=int, nargs="+", default=[10, 14, 16, 18])
    ap.add_argument("--n", type=int, default=10**6)
    args = ap.parse_args(argv)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not available; timing the numpy backend only")
    rng = np.random.default_rng(0)
    bench_pricing(backends, args.dims, args.repeat, rng)
    bench_counts(backends, args.n, 4, int(np.ceil(args.n ** 0.4)), args.repeat, rng)


if __name__ == "__main__":
    main()
