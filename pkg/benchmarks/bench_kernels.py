"""Time the compiled lattice kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--atoms 6 7 8 9 10] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from scopkit import _pykernels
from scopkit.lattice import powerset_lattice

try:
    from scopkit import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def powerset_inputs(k):
    lat = powerset_lattice([f"a{i}" for i in range(k)], validate=False)
    n = len(lat)
    adj = np.zeros((n, n), dtype=np.uint8)
    idx = {a: i for i, a in enumerate(lat.elements)}
    for a, b in lat.order_pairs:
        adj[idx[a], idx[b]] = 1
    return adj, np.asarray(lat._leq, dtype=np.uint8)


def best(fn, arg, repeat):
    return min(timeit.repeat(lambda: fn(arg), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--atoms", type=int, nargs="+", default=[6, 7, 8, 9, 10])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
    header = f"{'atoms':>5} {'n':>5} {'kernel':>8} {'python s':>10} {'cython s':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for k in args.atoms:
        adj, leq = powerset_inputs(k)
        for name, arg in (("closure", adj), ("meet", leq)):
            py = best(getattr(_pykernels, {"closure": "transitive_closure", "meet": "meet_table"}[name]), arg, args.repeat)
            if _ckernels is not None:
                fn = getattr(_ckernels, {"closure": "transitive_closure", "meet": "meet_table"}[name])
                assert np.array_equal(np.asarray(fn(arg)), np.asarray(getattr(_pykernels, fn.__name__)(arg)))
                cy = best(fn, arg, args.repeat)
                print(f"{k:>5} {len(adj):>5} {name:>8} {py:>10.4f} {cy:>10.4f} {py / cy:>7.1f}x")
            else:
                print(f"{k:>5} {len(adj):>5} {name:>8} {py:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
