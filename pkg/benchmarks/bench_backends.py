#!/usr/bin/env python3
"""Benchmark the numba and numpy backends on the hot kernels.

Times Bessel-K array evaluation, the Matern radial profile and full
Gram assembly (pairwise distances + profile) on both implementations,
plus one end-to-end Christoffel solve.  Both backends are imported
side by side, so this is independent of the CHRISTOFFEL_BACKEND
environment variable.

Usage: python benchmarks/bench_backends.py [--n 2000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from christoffel import _impl_numpy

try:
    from christoffel import _impl_numba

    HAVE_NUMBA = True
except ImportError:
    _impl_numba = None
    HAVE_NUMBA = False


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def run(n: int, repeats: int) -> None:
    rng = np.random.default_rng(0)
    xs = rng.uniform(1e-3, 30.0, size=n * n // 4)
    r = rng.uniform(0.0, 4.0, size=n * n // 4)
    pts = rng.uniform(-1.0, 1.0, size=(n, 2))

    backends = [("numpy", _impl_numpy)]
    if HAVE_NUMBA:
        # trigger compilation outside the timed region
        _impl_numba.kv_array(0.7, xs[:8])
        _impl_numba.matern_profile(r[:8], 1.0, 0.5)
        _impl_numba.pairwise_dists(pts[:8], pts[:8])
        backends.append(("numba", _impl_numba))
    else:
        print("numba not installed; timing the numpy backend only")

    cases = [
        ("kv_array      (%d evals)" % xs.size, lambda im: im.kv_array(0.7, xs)),
        ("matern_profile(%d evals)" % r.size, lambda im: im.matern_profile(r, 1.0, 0.5)),
        ("pairwise_dists(%dx%d)" % (n, n), lambda im: im.pairwise_dists(pts, pts)),
        (
            "gram assembly (%dx%d)" % (n, n),
            lambda im: im.matern_profile(im.pairwise_dists(pts, pts), 0.5, 1.0),
        ),
    ]

    print(f"{'case':34s}" + "".join(f"{name:>12s}" for name, _ in backends) + "   agreement")
    for label, fn in cases:
        times = []
        results = []
        for _, impl in backends:
            t, res = best_of(lambda impl=impl: fn(impl), repeats)
            times.append(t)
            results.append(np.asarray(res))
        agree = max(
            float(np.max(np.abs(res - results[0]))) for res in results[1:]
        ) if len(results) > 1 else 0.0
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
        print(row + f"   max|diff| {agree:.2e}")

    # end-to-end: assemble + factor + all-support query through the library
    import christoffel as ch

    sample = ch.from_iid_sample(pts)
    spec = ch.matern(0.5, 1.0, 2)
    t, _ = best_of(
        lambda: ch.christoffel_at_support_all(ch.assemble(spec, sample, 1e-3)), repeats
    )
    print(f"\nend-to-end assemble+factor+query, n={n} (active backend "
          f"{ch.active_backend()}): {t:.2f}s")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    run(args.n, args.repeats)
