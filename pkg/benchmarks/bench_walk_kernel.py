"""Compare the compiled walk kernel with the numpy fallback.

    python benchmarks/bench_walk_kernel.py [--walks N] [--n N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from renewal_lab import _walk_py
from renewal_lab.masses import make_masses
from renewal_lab.mc import hit_counts

try:
    from renewal_lab import _walk_kernels
except ImportError:
    _walk_kernels = None


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--walks", type=int, default=200_000)
    parser.add_argument("--n", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--masses", default="1/6,1/3,1/6,1/3")
    args = parser.parse_args()

    m = make_masses(args.masses.split(","))
    backends = {"python": _walk_py}
    if _walk_kernels is not None:
        backends["compiled"] = _walk_kernels
    else:
        print("compiled kernel not built; timing the fallback only")

    results, timings = {}, {}
    for name, mod in backends.items():
        results[name] = hit_counts(m, args.n, args.walks, 1, kernels=mod)
        t = timeit.repeat(lambda: hit_counts(m, args.n, args.walks, 1, kernels=mod), number=1, repeat=args.repeat)
        timings[name] = min(t)
        print(f"{name:9s} best of {args.repeat}: {timings[name] * 1e3:8.1f} ms  ({args.walks / timings[name]:,.0f} walks/s)")

    if len(backends) == 2:
        same = np.array_equal(results["python"], results["compiled"])
        print(f"identical counts: {same}")
        print(f"speedup: {timings['python'] / timings['compiled']:.2f}x")


if __name__ == "__main__":
    main()
