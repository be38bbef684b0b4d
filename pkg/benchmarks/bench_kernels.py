"""Compare the compiled and numpy kernels on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat N]

chol_pivots: one batched evaluation of a Gaussian grid as used by the bound
optimizers.  vertex_candidates: vertex enumeration of a 3-variable system of
the size produced by projection.
"""
import argparse
import timeit

import numpy as np

from rbcfb import _pykernels

try:
    from rbcfb import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    rng = np.random.default_rng(0)
    W = rng.normal(size=(20_000, 6, 6))
    cov = np.ascontiguousarray(W @ np.swapaxes(W, 1, 2))
    order = np.array([2, 0, 5, 1], dtype=np.intp)
    A = np.vstack([-np.eye(3), rng.integers(-2, 4, size=(11, 3))]).astype(float)
    b = np.concatenate([np.zeros(3), rng.uniform(0.5, 3.0, 11)])
    eq = np.zeros(len(b), dtype=np.uint8)
    return {
        "chol_pivots (20000 x 6x6, 4 pivots)": ("chol_pivots", (cov, order, 1e-12)),
        "vertex_candidates (14 rows, 3 vars)": ("vertex_candidates", (A, b, eq, 1e-8)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; run: python3 setup.py build_ext --inplace")
    print(f"{'kernel':40s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, (name, call) in workloads().items():
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*call), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:40s} {t_py * 1e3:10.2f} {'-':>10s} {'-':>8s}")
            continue
        cy = getattr(_ckernels, name)
        np.testing.assert_allclose(cy(*call), py(*call), rtol=1e-10, atol=1e-12)
        t_cy = min(timeit.repeat(lambda: cy(*call), number=1, repeat=args.repeat))
        print(f"{label:40s} {t_py * 1e3:10.2f} {t_cy * 1e3:10.2f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
