"""Numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them loop for
loop.  Both must agree to rounding error (see tests/test_kernels.py).
"""
import itertools

import numpy as np


def chol_pivots(cov, order, rtol=1e-12):
    """Sequential conditional variances of ``cov`` along ``order``.

    Runs an outer-product Cholesky over a stack of covariance matrices,
    vectorized across the stack.  Pivot ``i`` is the variance of variable
    ``order[i]`` given ``order[:i]``.  A pivot at or below
    ``max(rtol, rtol * cov_ii)`` marks a variable that is (numerically)
    determined by its predecessors; it is reported as 0 and its column is
    dropped from the factor so later pivots are unaffected.

    cov : (N, n, n) float64
    order : sequence of int indices into the last two axes
    returns : (N, len(order)) float64
    """
    cov = np.asarray(cov, dtype=np.float64)
    order = np.asarray(order, dtype=np.intp)
    N = cov.shape[0]
    k = order.shape[0]
    sub = cov[:, order[:, None], order[None, :]]
    L = np.zeros((N, k, k))
    piv = np.zeros((N, k))
    for i in range(k):
        for j in range(i + 1):
            s = sub[:, i, j] - np.einsum("nm,nm->n", L[:, i, :j], L[:, j, :j])
            if i == j:
                diag = sub[:, i, i]
                thr = np.maximum(rtol, rtol * diag)
                ok = s > thr
                piv[:, i] = np.where(ok, s, 0.0)
                L[:, i, i] = np.where(ok, np.sqrt(np.where(ok, s, 1.0)), 0.0)
            else:
                d = L[:, j, j]
                L[:, i, j] = np.where(d > 0.0, s / np.where(d > 0.0, d, 1.0), 0.0)
    return piv


def vertex_candidates(A, b, eq, tol=1e-8):
    """Feasible basic points of ``{x : A x <= b, A[eq] x == b[eq]}``.

    Every subset of ``n`` rows with a well-conditioned square matrix is
    solved; the solution is kept when it satisfies all rows within ``tol``.
    Duplicates are not removed here.

    A : (m, n) float64 with n <= 3
    returns : (K, n) float64
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    eq = np.asarray(eq, dtype=bool)
    m, n = A.shape
    if m < n:
        return np.zeros((0, n))
    combos = np.array(list(itertools.combinations(range(m), n)), dtype=np.intp)
    M = A[combos]
    rhs = b[combos]
    det = np.linalg.det(M)
    scale = np.prod(np.abs(M).max(axis=2), axis=1)
    good = np.abs(det) > 1e-12 * np.maximum(scale, 1e-300)
    if not good.any():
        return np.zeros((0, n))
    x = np.linalg.solve(M[good], rhs[good][..., None])[..., 0]
    slack = x @ A.T - b
    feas = np.all(slack <= tol, axis=1)
    if eq.any():
        feas &= np.all(np.abs(slack[:, eq]) <= tol, axis=1)
    return x[feas]
