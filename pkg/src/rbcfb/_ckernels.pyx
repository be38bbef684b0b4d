# Compiled counterparts of rbcfb._pykernels; same signatures, same results.
import numpy as np

from libc.math cimport sqrt, fabs


def chol_pivots(cov, order, double rtol=1e-12):
    cdef const double[:, :, ::1] C = np.ascontiguousarray(cov, dtype=np.float64)
    cdef const Py_ssize_t[::1] o = np.ascontiguousarray(order, dtype=np.intp)
    cdef Py_ssize_t N = C.shape[0]
    cdef Py_ssize_t k = o.shape[0]
    out = np.zeros((N, k), dtype=np.float64)
    cdef double[:, ::1] piv = out
    cdef double[:, ::1] L = np.zeros((k, k), dtype=np.float64)
    cdef Py_ssize_t n, i, j, m
    cdef double s, thr, d
    for n in range(N):
        for i in range(k):
            for j in range(i + 1):
                s = C[n, o[i], o[j]]
                for m in range(j):
                    s -= L[i, m] * L[j, m]
                if i == j:
                    thr = rtol * C[n, o[i], o[i]]
                    if thr < rtol:
                        thr = rtol
                    if s > thr:
                        piv[n, i] = s
                        L[i, i] = sqrt(s)
                    else:
                        piv[n, i] = 0.0
                        L[i, i] = 0.0
                else:
                    d = L[j, j]
                    L[i, j] = s / d if d > 0.0 else 0.0
    return out


cdef double _solve_small(double *M, double *r, Py_ssize_t n, double *x):
    # Gaussian elimination with partial pivoting on an n x n (n <= 3) system;
    # returns |det M| (0 when singular).
    cdef double a[3][4]
    cdef Py_ssize_t i, j, c, p
    cdef double best, f, tmp
    cdef double det = 1.0
    for i in range(n):
        for j in range(n):
            a[i][j] = M[i * n + j]
        a[i][n] = r[i]
    for c in range(n):
        p = c
        best = fabs(a[c][c])
        for i in range(c + 1, n):
            if fabs(a[i][c]) > best:
                best = fabs(a[i][c])
                p = i
        if best == 0.0:
            return 0.0
        det *= best
        if p != c:
            for j in range(n + 1):
                tmp = a[c][j]
                a[c][j] = a[p][j]
                a[p][j] = tmp
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            for j in range(c, n + 1):
                a[i][j] -= f * a[c][j]
    for i in range(n - 1, -1, -1):
        tmp = a[i][n]
        for j in range(i + 1, n):
            tmp -= a[i][j] * x[j]
        x[i] = tmp / a[i][i]
    return det


def vertex_candidates(A, b, eq, double tol=1e-8):
    cdef const double[:, ::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef unsigned char[::1] ev = np.ascontiguousarray(eq, dtype=np.uint8)
    cdef Py_ssize_t m = Av.shape[0]
    cdef Py_ssize_t n = Av.shape[1]
    if n > 3:
        raise ValueError("vertex_candidates supports at most 3 variables")
    if m < n or n == 0:
        return np.zeros((0, n))
    cdef double M[9]
    cdef double r[3]
    cdef double x[3]
    cdef Py_ssize_t idx[3]
    cdef Py_ssize_t i, j, t, q
    cdef double scale, rowmax, s
    cdef bint feas
    pts = []
    # lexicographic enumeration of n-subsets, matching itertools.combinations
    for t in range(n):
        idx[t] = t
    while True:
        scale = 1.0
        for t in range(n):
            rowmax = 0.0
            for j in range(n):
                M[t * n + j] = Av[idx[t], j]
                if fabs(Av[idx[t], j]) > rowmax:
                    rowmax = fabs(Av[idx[t], j])
            r[t] = bv[idx[t]]
            scale *= rowmax
        if scale > 0.0 and _solve_small(M, r, n, x) > 1e-12 * scale:
            feas = True
            for i in range(m):
                s = -bv[i]
                for j in range(n):
                    s += Av[i, j] * x[j]
                if s > tol or (ev[i] and s < -tol):
                    feas = False
                    break
            if feas:
                pts.append([x[j] for j in range(n)])
        # advance combination
        q = n - 1
        while q >= 0 and idx[q] == m - n + q:
            q -= 1
        if q < 0:
            break
        idx[q] += 1
        for t in range(q + 1, n):
            idx[t] = idx[t - 1] + 1
    if not pts:
        return np.zeros((0, n))
    return np.array(pts, dtype=np.float64)
