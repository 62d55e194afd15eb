#!/usr/bin/env python3
"""Benchmark the pair-counting kernels: compiled extension vs numpy fallback.

Usage: python benchmarks/bench_concordance.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from taubounds import _concordance_py

try:
    from taubounds import _concordance as _ext
except ImportError:
    _ext = None


def best_of(repeat, fn, *args):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'n':>9s} {'fallback':>12s} {'compiled':>12s} {'speedup':>8s}")
    print("-" * 74)

    for n in (1_000, 3_000, 10_000):
        x = np.ascontiguousarray(rng.standard_normal(n))
        y = np.ascontiguousarray(rng.standard_normal(n))
        t_py = best_of(args.repeat, _concordance_py.net_concordance_quadratic, x, y)
        if _ext is not None:
            t_cy = best_of(args.repeat, _ext.net_concordance_quadratic, x, y)
            assert _ext.net_concordance_quadratic(x, y) \
                == _concordance_py.net_concordance_quadratic(x, y)
            ratio = f"{t_py / t_cy:7.1f}x"
            cy = f"{t_cy * 1e3:10.2f}ms"
        else:
            cy, ratio = "n/a", ""
        print(f"{'quadratic pair count':28s} {n:9d} {t_py*1e3:10.2f}ms {cy:>12s} {ratio:>8s}")

    for n in (100_000, 1_000_000):
        a = np.ascontiguousarray(rng.standard_normal(n))
        t_py = best_of(args.repeat, _concordance_py.discordant_by_merge, a)
        if _ext is not None:
            t_cy = best_of(args.repeat, _ext.discordant_by_merge, a)
            assert int(_ext.discordant_by_merge(a)) \
                == int(_concordance_py.discordant_by_merge(a))
            ratio = f"{t_py / t_cy:7.1f}x"
            cy = f"{t_cy * 1e3:10.2f}ms"
        else:
            cy, ratio = "n/a", ""
        print(f"{'merge-sort inversion count':28s} {n:9d} {t_py*1e3:10.2f}ms {cy:>12s} {ratio:>8s}")

    if _ext is None:
        print("\ncompiled extension not available; fallback timings only")


if __name__ == "__main__":
    main()
