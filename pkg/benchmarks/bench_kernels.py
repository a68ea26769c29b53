"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each workload is timed under every available backend; the best of N runs is
reported together with the speed-up over the Python fallback.
"""
from __future__ import annotations

import argparse
import random
import timeit

from sumset_lab import _kernels
from sumset_lab.core import ZpSet, ZSet, translate_rows
from sumset_lab.select import endpoint_plus_scan


def _random_rows(rng: random.Random, span: int, na: int, nb: int) -> list[int]:
    A = ZSet(rng.sample(range(span), na))
    B = ZSet(rng.sample(range(span), nb))
    return translate_rows(A, B).rows


def workloads() -> dict[str, callable]:
    rng = random.Random(0)
    rows_z = _random_rows(rng, 400, 120, 30)
    p = 1009
    A = ZpSet(p, rng.sample(range(p), 400))
    B = ZpSet(p, rng.sample(range(p), 40))
    rows_p = translate_rows(A, B).rows
    small = [(ZSet.from_mask(rng.randrange(1, 1 << 10)), ZSet.from_mask(rng.randrange(1, 1 << 10) | 1))
             for _ in range(2000)]

    return {
        "best_union Z, |B|=30, c=3": lambda: _kernels.best_union(rows_z, 3, -1),
        "best_union Z_1009, |B|=40, c=3": lambda: _kernels.best_union(rows_p, 3, -1),
        "best_union Z_1009, |B|=40, c=2": lambda: _kernels.best_union(rows_p, 2, -1),
        "best_union Z_1009, |B|=40, c=4": lambda: _kernels.best_union(rows_p, 4, -1),
        "union_sizes Z_1009, 40 rows": lambda: _kernels.union_sizes(rows_p[0], rows_p),
        "endpoint scan, 2000 pairs in [0,9]": lambda: [endpoint_plus_scan(a, b) for a, b in small],
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is timed")
    jobs = workloads()
    width = max(map(len, jobs))
    print(f"{'workload':<{width}}  " + "  ".join(f"{b + ' us':>12}" for b in backends) + "  speed-up")
    for name, fn in jobs.items():
        times = {}
        for b in backends:
            _kernels.use_backend(b)
            times[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        cols = "  ".join(f"{times[b] * 1e6:>12.0f}" for b in backends)
        speed = f"{times['python'] / times['cython']:>7.1f}x" if "cython" in times else ""
        print(f"{name:<{width}}  {cols}  {speed}")
    _kernels.use_backend("cython" if "cython" in backends else "python")


if __name__ == "__main__":
    main()
