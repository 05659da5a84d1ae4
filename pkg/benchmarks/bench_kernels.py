"""Compare the compiled kernels against the pure numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--rows 20000] [--dims 4000] [--k 32]
Reports per-kernel best-of-5 wall time for both backends and the speedup.
The numbers are the justification for shipping the compiled extension;
results are machine-dependent.
"""

import argparse
import importlib
import time

import numpy as np

from palate.kernels import _pykernels
from palate.matrix import FeatureMatrix
from palate.seeding import make_rng

try:
    _ck = importlib.import_module("palate.kernels._ckernels")
except ImportError:
    _ck = None


def make_sparse(rng, rows: int, dims: int, nnz_per_row: int) -> FeatureMatrix:
    pairs = []
    for _ in range(rows):
        idx = np.sort(rng.choice(dims, size=nnz_per_row, replace=False)).astype(np.int64)
        vals = rng.random(nnz_per_row)
        vals /= np.linalg.norm(vals)
        pairs.append((idx, vals))
    return FeatureMatrix.from_rows(pairs, dims)


def best_of(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--dims", type=int, default=4000)
    ap.add_argument("--nnz", type=int, default=30)
    ap.add_argument("--k", type=int, default=32)
    args = ap.parse_args()

    rng = make_rng(0)
    X = make_sparse(rng, args.rows, args.dims, args.nnz)
    k = args.k
    centroids = rng.random((k, args.dims))
    centroid_sq = np.einsum("ij,ij->i", centroids, centroids)
    labels = rng.integers(0, k, size=args.rows).astype(np.int64)
    resp = rng.random((args.rows, k))
    resp /= resp.sum(axis=1, keepdims=True)
    variances = rng.random((k, args.dims)) + 0.1
    inv_var = 1.0 / variances
    comp_const = np.sum(np.log(2 * np.pi * variances) + centroids ** 2 * inv_var, axis=1)

    n_pairs = 200_000
    iidx = rng.integers(0, 2000, size=n_pairs).astype(np.int64)
    jidx = rng.integers(0, 2000, size=n_pairs).astype(np.int64)
    logx = rng.random(n_pairs) + 0.1
    fw = rng.random(n_pairs)
    order = rng.permutation(n_pairs).astype(np.int64)

    def glove_args():
        return (iidx, jidx, logx, fw, order,
                rng.random((2000, 50)), rng.random((2000, 50)),
                rng.random(2000), rng.random(2000),
                np.ones((2000, 50)), np.ones((2000, 50)),
                np.ones(2000), np.ones(2000), 0.05)

    cases = {
        "assign_points": lambda m: m.assign_points(
            X.indptr, X.indices, X.data, X.row_sq_norms, centroids, centroid_sq),
        "centroid_sums": lambda m: m.centroid_sums(
            X.indptr, X.indices, X.data, labels, k, args.dims),
        "weighted_column_sums": lambda m: m.weighted_column_sums(
            X.indptr, X.indices, X.data, resp, args.dims),
        "gmm_log_densities": lambda m: m.gmm_log_densities(
            X.indptr, X.indices, X.data, centroids, inv_var, comp_const),
        "glove_epoch": lambda m: m.glove_epoch(*glove_args()),
    }

    print(f"rows={args.rows} dims={args.dims} nnz/row={args.nnz} k={k}")
    print(f"{'kernel':<22}{'python (s)':>12}{'cython (s)':>12}{'speedup':>9}")
    for name, fn in cases.items():
        py = best_of(lambda: fn(_pykernels))
        if _ck is None:
            print(f"{name:<22}{py:>12.4f}{'n/a':>12}{'n/a':>9}")
            continue
        cy = best_of(lambda: fn(_ck))
        print(f"{name:<22}{py:>12.4f}{cy:>12.4f}{py / cy:>8.1f}x")
    if _ck is None:
        print("compiled extension not available; showing fallback only")


if __name__ == "__main__":
    main()
