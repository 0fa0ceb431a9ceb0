"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Each row times one call per backend (best of N) and checks that both
backends return the same result.
"""

import argparse
import time

import numpy as np

from properlab import kernels
from properlab.properness import sl2_formula_audit


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    # max_rank = -1 never matches, so every Weyl element is visited
    E7 = rng.integers(-2, 3, size=(3, 7))
    B7 = rng.integers(-2, 3, size=(7, 3))
    yield "weyl_scan S_7 (5040 elements)", lambda b: kernels.weyl_scan(0, E7, B7, -1, backend=b)
    E5 = rng.integers(-2, 3, size=(2, 5))
    B5 = rng.integers(-2, 3, size=(5, 2))
    yield "weyl_scan B_5 (3840 elements)", lambda b: kernels.weyl_scan(1, E5, B5, -1, backend=b)
    gs = [rng.normal(size=(6, 6)) for _ in range(200)]
    yield "log_singular_values 6x6 x200", lambda b: [tuple(kernels.log_singular_values(g, backend=b)) for g in gs]
    x = rng.uniform(-1, 1, size=(50_000, 3))
    ginv = np.diag([np.e, 1.0, 1 / np.e])
    half = np.ones(3)
    yield "overlap_count box 50k points", lambda b: kernels.overlap_count(x, ginv, half, 0, backend=b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        kernels.backend_module("cython")
    except ImportError:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'kernel':34s} {'cython':>10s} {'python':>10s} {'speedup':>8s}")
    for name, fn in cases():
        tc, rc = best_of(lambda: fn("cython"), args.repeat)
        tp, rp = best_of(lambda: fn("python"), args.repeat)
        same = rc == rp if not isinstance(rc, list) else np.allclose(rc, rp, atol=1e-12)
        print(f"{name:34s} {tc:10.4f} {tp:10.4f} {tp / tc:7.1f}x{'' if same else '  MISMATCH'}")

    # end-to-end: the SL(2) audit runs the Weyl scan for every (partition, m)
    t0 = time.perf_counter()
    sl2_formula_audit(7)
    print(f"{'sl2 audit n <= 7 (active backend)':34s} {time.perf_counter() - t0:10.4f}s  [{kernels.BACKEND}]")


if __name__ == "__main__":
    main()
