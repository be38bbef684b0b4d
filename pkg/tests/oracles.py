"""Independent reference computations used by the tests.

Nothing here imports the code under test beyond plain data containers;
each oracle recomputes its answer by a different route (explicit loops,
sampling, one-dimensional feasibility).
"""
import itertools
import math

import numpy as np


def brute_marginal(probs, names, keep):
    """Dict {outcome tuple over keep: probability} by explicit enumeration."""
    idx = [names.index(k) for k in keep]
    out = {}
    for cell in itertools.product(*[range(s) for s in probs.shape]):
        key = tuple(cell[i] for i in idx)
        out[key] = out.get(key, 0.0) + float(probs[cell])
    return out


def brute_entropy(probs, names, vars_):
    if not vars_:
        return 0.0
    h = 0.0
    for p in brute_marginal(probs, names, list(vars_)).values():
        if p > 0:
            h -= p * math.log2(p)
    return h


def brute_cmi(probs, names, left, right, cond=()):
    """I(L;R|C) as a direct sum over outcomes of p log p(lrc)p(c)/(p(lc)p(rc))."""
    L, R, C = list(left), list(right), list(cond)
    plrc = brute_marginal(probs, names, L + R + C)
    plc = brute_marginal(probs, names, L + C)
    prc = brute_marginal(probs, names, R + C)
    pc = brute_marginal(probs, names, C) if C else {(): 1.0}
    nl, nr = len(L), len(R)
    total = 0.0
    for key, p in plrc.items():
        if p <= 0:
            continue
        l, r, c = key[:nl], key[nl:nl + nr], key[nl + nr:]
        total += p * math.log2(p * pc[c] / (plc[l + c] * prc[r + c]))
    return total


def cov_expand(terms, variances):
    """Covariance of linear forms sum_k w_k S_k of independent sources S_k.

    ``terms`` maps output name -> {source: weight}; ``variances`` maps source
    -> variance.  Returns (names, matrix).
    """
    names = list(terms)
    M = np.zeros((len(names), len(names)))
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            M[i, j] = sum(w * terms[b].get(s, 0.0) * variances[s] for s, w in terms[a].items())
    return names, M


def monte_carlo_gaussian_cmi(cov, A, B, C, draws, seed):
    """Plug-in estimate of I(A;B|C) from ``draws`` samples of N(0, cov).

    Uses sample covariances and log-determinants, so it shares no code with
    the pivot-based evaluator.
    """
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(cov + 0.0 * np.eye(len(cov)))
    x = rng.standard_normal((draws, len(cov))) @ L.T
    S = np.cov(x, rowvar=False)

    def ld(idx):
        if not idx:
            return 0.0
        return np.linalg.slogdet(S[np.ix_(idx, idx)])[1]

    val = 0.5 * (ld(A + C) + ld(B + C) - ld(A + B + C) - ld(C))
    return val / math.log(2)


def extends(A, b, eq, j, x, tol=1e-8):
    """Does point ``x`` (all coordinates except j) extend to a feasible point?

    One-dimensional feasibility: collect the interval of allowed values for
    coordinate j from every row.
    """
    lo, hi = -math.inf, math.inf
    cols = [k for k in range(A.shape[1]) if k != j]
    for a, rhs, e in zip(A, b, eq):
        rest = float(a[cols] @ x)
        c = float(a[j])
        rows = [(c, rhs - rest)] + ([(-c, -(rhs - rest))] if e else [])
        for cc, r in rows:
            if abs(cc) <= 1e-12:
                if r < -tol:
                    return False
            elif cc > 0:
                hi = min(hi, r / cc)
            else:
                lo = max(lo, r / cc)
    return lo <= hi + tol


def random_system(seed, n, m):
    """m random integer rows over n variables with the origin strictly inside."""
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    b = rng.uniform(0.5, 3.0, size=m)
    return A, b


def slice_r0(sys):
    """The system with R0 = 0 added (rows over R0, R1, R2)."""
    from rbcfb.polytope import HalfspaceSystem
    names = ("R0", "R1", "R2")
    rows = [(dict(zip(names, a)), "=" if e else "<=", r) for a, r, e in zip(sys.A, sys.b, sys.eq)]
    return HalfspaceSystem.from_rows(names, rows + [({"R0": 1.0}, "=", 0.0)])
