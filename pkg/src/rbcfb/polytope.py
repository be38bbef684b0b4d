"""Linear inequality systems over named rate variables.

A ``HalfspaceSystem`` stores rows ``a . x <= b`` or ``a . x == b``.  The
operations here are the ones the region checks need: Fourier-Motzkin
elimination, LP-certified redundancy removal, vertex enumeration in up to
three dimensions, support functions and a tolerance-based equality test.

All linear programs go through ``scipy.optimize.linprog`` (HiGHS dual
simplex) with feasibility tolerances tightened to 1e-10.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import kernels

__all__ = [
    "Comparison",
    "HalfspaceSystem",
    "UnsupportedError",
    "VertexSet",
    "enumerate_vertices",
    "farkas_certificate",
    "feasible_point",
    "fme_eliminate",
    "infeasible_system",
    "is_empty",
    "polytopes_equal",
    "project",
    "remove_redundant",
    "substitute",
    "support",
    "support_directions",
]

COEF_TOL = 1e-9
REDUNDANCY_TOL = 1e-9
VERTEX_TOL = 1e-8
N_DIRECTIONS = 64
_DIRECTION_SEED = 64

_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}

LE, EQ = "<=", "="


class UnsupportedError(ValueError):
    """Operation not available for this system (e.g. too many dimensions)."""


def _snap(A):
    # zero out tiny coefficients and snap near-integers so row keys are stable
    A = np.where(np.abs(A) <= COEF_TOL, 0.0, A)
    r = np.round(A)
    A = np.where(np.abs(A - r) <= COEF_TOL, r, A)
    return A + 0.0  # turns -0.0 into 0.0


@dataclass(frozen=True)
class HalfspaceSystem:
    """Rows ``A[i] . x (<= or ==) b[i]`` over the ordered variables ``vars``.

    ``labels`` optionally names each row (used by constraint builders so that
    certificates can point at rows by meaning); derived systems carry empty
    labels.
    """
    vars: tuple
    A: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    eq: np.ndarray = field(repr=False)
    labels: tuple = field(default=None, repr=False)

    def __post_init__(self):
        vars_ = tuple(self.vars)
        if len(set(vars_)) != len(vars_):
            raise ValueError(f"duplicate variables in {vars_}")
        A = np.array(self.A, dtype=np.float64).reshape(-1, len(vars_))
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        eq = np.array(self.eq, dtype=bool).reshape(-1)
        if not (A.shape[0] == b.shape[0] == eq.shape[0]):
            raise ValueError("row count mismatch between A, b and eq")
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
            raise ValueError("coefficients and right-hand sides must be finite")
        labels = self.labels
        labels = ("",) * len(b) if labels is None else tuple(labels)
        if len(labels) != len(b):
            raise ValueError("one label per row required")
        for arr in (A, b, eq):
            arr.setflags(write=False)
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eq", eq)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, vars, rows):
        """Build from ``(coeffs: dict, rel, rhs[, label])`` tuples.

        ``rel`` is one of "<=", ">=", "="; ">=" rows are negated into "<=".
        """
        vars = tuple(vars)
        idx = {v: i for i, v in enumerate(vars)}
        A, b, eq, labels = [], [], [], []
        for row in rows:
            coeffs, rel, rhs = row[:3]
            label = row[3] if len(row) > 3 else ""
            a = np.zeros(len(vars))
            for name, c in coeffs.items():
                if name not in idx:
                    raise ValueError(f"unknown variable {name!r}")
                a[idx[name]] += c
            if rel == ">=":
                a, rhs = -a, -rhs
            elif rel not in (LE, EQ):
                raise ValueError(f"unknown relation {rel!r}")
            A.append(a)
            b.append(float(rhs) + 0.0)
            eq.append(rel == EQ)
            labels.append(label)
        return cls(vars, np.array(A).reshape(-1, len(vars)), b, eq, labels)

    @property
    def nrows(self):
        return len(self.b)

    @property
    def dim(self):
        return len(self.vars)

    def violation(self, x):
        """Largest row violation at point(s) ``x`` (<= 0 means inside)."""
        x = np.asarray(x, dtype=np.float64)
        if self.nrows == 0:
            return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
        slack = x @ self.A.T - self.b
        slack = np.where(self.eq, np.abs(slack), slack)
        return slack.max(axis=-1)

    def contains(self, x, tol=VERTEX_TOL):
        return bool(self.violation(x) <= tol)

    def canonical(self):
        """Equivalent system with snapped coefficients, sorted unique rows.

        Trivial rows ``0 <= b`` with ``b >= 0`` are dropped; a trivially
        violated row collapses the system to ``infeasible_system``.
        """
        A = _snap(self.A)
        b = self.b + 0.0
        eq = self.eq
        zero = ~np.any(A != 0.0, axis=1)
        bad = zero & ((b < -COEF_TOL) | (eq & (np.abs(b) > COEF_TOL)))
        if np.any(bad):
            return infeasible_system(self.vars)
        keep = ~zero
        A, b, eq = A[keep], b[keep], eq[keep]
        labels = [l for l, k in zip(self.labels, keep) if k]
        if len(b) == 0:
            return HalfspaceSystem(self.vars, A, b, eq, labels)
        keys = np.column_stack([eq.astype(float), A, b])
        order = np.lexsort(keys.T[::-1])
        out_rows, out_labels, last = [], [], None
        for i in order:
            key = keys[i].tobytes()
            if key == last:
                continue
            last = key
            out_rows.append(i)
            out_labels.append(labels[i])
        out_rows = np.array(out_rows, dtype=np.intp)
        return HalfspaceSystem(self.vars, A[out_rows], b[out_rows], eq[out_rows], out_labels)

    def is_infeasible_marker(self):
        return self.nrows == 1 and not np.any(self.A) and self.b[0] < 0

    def with_rows(self, A, b, eq=None, labels=None):
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        b = np.atleast_1d(np.asarray(b, dtype=np.float64))
        eq = np.zeros(len(b), dtype=bool) if eq is None else np.atleast_1d(eq)
        labels = ("",) * len(b) if labels is None else tuple(labels)
        return HalfspaceSystem(self.vars, np.vstack([self.A, A]), np.concatenate([self.b, b]),
                               np.concatenate([self.eq, eq]), self.labels + labels)

    def nonnegative(self):
        """Intersection with the nonnegative orthant."""
        n = self.dim
        return self.with_rows(-np.eye(n), np.zeros(n),
                              labels=[f"{v} >= 0" for v in self.vars])

    def to_json(self):
        rows = []
        for a, rhs, e, label in zip(self.A, self.b, self.eq, self.labels):
            row = {"coeffs": [float(c) for c in a], "rel": EQ if e else LE, "rhs": float(rhs)}
            if label:
                row["label"] = label
            rows.append(row)
        return {"variables": list(self.vars), "rows": rows}

    @classmethod
    def from_json(cls, obj):
        vars_ = tuple(obj["variables"])
        rows = obj["rows"]
        A = np.array([r["coeffs"] for r in rows], dtype=np.float64).reshape(-1, len(vars_))
        b = [r["rhs"] for r in rows]
        eq = []
        for r in rows:
            if r["rel"] not in (LE, EQ):
                raise ValueError(f"unknown relation {r['rel']!r}")
            eq.append(r["rel"] == EQ)
        labels = [r.get("label", "") for r in rows]
        return cls(vars_, A, b, eq, labels)

    def __str__(self):
        lines = []
        for a, rhs, e in zip(self.A, self.b, self.eq):
            terms = []
            for c, v in zip(a, self.vars):
                if c == 0:
                    continue
                coef = "" if c == 1 else "-" if c == -1 else f"{c:g}*"
                terms.append(f"{coef}{v}")
            lhs = " + ".join(terms).replace("+ -", "- ") or "0"
            lines.append(f"{lhs} {'=' if e else '<='} {rhs:.10g}")
        return "\n".join(lines)


def infeasible_system(vars):
    """The canonical empty system ``0 <= -1``."""
    n = len(vars)
    return HalfspaceSystem(tuple(vars), np.zeros((1, n)), [-1.0], [False])


@dataclass(frozen=True)
class VertexSet:
    vars: tuple
    points: np.ndarray = field(repr=False)
    tol: float = VERTEX_TOL

    def __len__(self):
        return len(self.points)

    def to_json(self):
        return {"variables": list(self.vars),
                "points": [[float(c) for c in p] for p in self.points],
                "tol": self.tol}

    @classmethod
    def from_json(cls, obj):
        vars_ = tuple(obj["variables"])
        pts = np.array(obj["points"], dtype=np.float64).reshape(-1, len(vars_))
        return cls(vars_, pts, float(obj["tol"]))


# ---------------------------------------------------------------- elimination

def substitute(sys, var, value):
    """Fix ``var`` to a constant and drop it from the variable list."""
    j = sys.vars.index(var)
    keep = [i for i in range(sys.dim) if i != j]
    b = sys.b - sys.A[:, j] * value
    return HalfspaceSystem(tuple(sys.vars[i] for i in keep), sys.A[:, keep], b, sys.eq,
                           sys.labels).canonical()


def fme_eliminate(sys, var):
    """Project ``sys`` onto the variables other than ``var``.

    An equality involving ``var`` is used for substitution when present
    (the one with the largest coefficient, ties to the first row).  Otherwise
    rows are split by the sign of their ``var`` coefficient, normalized to
    +-1 and added pairwise.  Coefficients with magnitude <= 1e-9 count as
    zero.  The result is canonicalized; an empty projection shows up as the
    row ``0 <= -1``.
    """
    if var not in sys.vars:
        raise ValueError(f"{var!r} not in {sys.vars}")
    j = sys.vars.index(var)
    keep = [i for i in range(sys.dim) if i != j]
    new_vars = tuple(sys.vars[i] for i in keep)
    A, b, eq = sys.A, sys.b, sys.eq
    col = np.where(np.abs(A[:, j]) <= COEF_TOL, 0.0, A[:, j])

    eq_rows = np.flatnonzero(eq & (col != 0.0))
    if len(eq_rows):
        e = eq_rows[np.argmax(np.abs(col[eq_rows]))]
        f = col / col[e]
        A2 = A - np.outer(f, A[e])
        b2 = b - f * b[e]
        mask = np.arange(len(b)) != e
        out = HalfspaceSystem(new_vars, A2[mask][:, keep], b2[mask], eq[mask])
        return out.canonical()

    pos = np.flatnonzero(col > 0)
    neg = np.flatnonzero(col < 0)
    zero = np.flatnonzero(col == 0)
    Ap = A[pos] / col[pos, None]
    bp = b[pos] / col[pos]
    An = A[neg] / -col[neg, None]
    bn = b[neg] / -col[neg]
    Ac = (Ap[:, None, :] + An[None, :, :]).reshape(-1, sys.dim)
    bc = (bp[:, None] + bn[None, :]).reshape(-1)
    A2 = np.vstack([A[zero], Ac])[:, keep]
    b2 = np.concatenate([b[zero], bc])
    eq2 = np.concatenate([eq[zero], np.zeros(len(bc), dtype=bool)])
    return HalfspaceSystem(new_vars, A2, b2, eq2).canonical()


def _lp(c, sys, free=True):
    ineq = ~sys.eq
    kw = {}
    if ineq.any():
        kw["A_ub"], kw["b_ub"] = sys.A[ineq], sys.b[ineq]
    if sys.eq.any():
        kw["A_eq"], kw["b_eq"] = sys.A[sys.eq], sys.b[sys.eq]
    bounds = (None, None) if free else (0, None)
    return linprog(c, bounds=bounds, method="highs-ds", options=_LP_OPTIONS, **kw)


def feasible_point(sys):
    """A point of ``sys`` or None when it is empty."""
    if sys.is_infeasible_marker():
        return None
    if sys.nrows == 0:
        return np.zeros(sys.dim)
    res = _lp(np.zeros(sys.dim), sys)
    if res.status == 0:
        return res.x
    if res.status == 2:
        return None
    raise ArithmeticError(f"LP failed: {res.message}")


def is_empty(sys):
    return feasible_point(sys) is None


def support(sys, w):
    """max w.x over ``sys``; -inf when empty, +inf when unbounded.

    Returns ``(value, argmax_point_or_None)``.
    """
    w = np.asarray(w, dtype=np.float64)
    if sys.is_infeasible_marker():
        return -np.inf, None
    res = _lp(-w, sys)
    if res.status == 0:
        return float(-res.fun), res.x
    if res.status == 2:
        # the dual simplex can report an unbounded problem as infeasible;
        # a feasible system without an optimum is unbounded
        if feasible_point(sys) is None:
            return -np.inf, None
        return np.inf, None
    if res.status == 3:
        return np.inf, None
    raise ArithmeticError(f"LP failed: {res.message}")


def remove_redundant(sys, tol=REDUNDANCY_TOL):
    """Equivalent system in which every inequality row is irredundant.

    Cheap passes first (canonicalization, merging parallel rows, keeping the
    tightest).  Then each remaining inequality is tested by maximizing its
    left side over the other retained rows; it is dropped when that maximum
    is at most its right side + ``tol``.  Unbounded maximization means the
    row is needed.  An empty system is returned as ``0 <= -1``.
    """
    sys = sys.canonical()
    if sys.is_infeasible_marker() or sys.nrows == 0:
        return sys
    A, b, eq = sys.A.copy(), sys.b.copy(), sys.eq
    # scale inequalities to unit max coefficient so parallel rows share a key
    scale = np.abs(A).max(axis=1)
    ineq = ~eq
    A[ineq] /= scale[ineq, None]
    b[ineq] /= scale[ineq]
    A = _snap(A)
    best = {}
    order = []
    for i in range(len(b)):
        if eq[i]:
            order.append(i)
            continue
        key = np.round(A[i], 9).tobytes()
        if key not in best:
            best[key] = i
            order.append(i)
        elif b[i] < b[best[key]]:
            order[order.index(best[key])] = i
            best[key] = i
    rows = np.array(order, dtype=np.intp)
    cur = HalfspaceSystem(sys.vars, A[rows], b[rows], eq[rows]).canonical()
    if cur.is_infeasible_marker():
        return cur
    if is_empty(cur):
        return infeasible_system(sys.vars)

    alive = np.ones(cur.nrows, dtype=bool)
    for i in range(cur.nrows):
        if cur.eq[i]:
            continue
        alive[i] = False
        others = HalfspaceSystem(cur.vars, cur.A[alive], cur.b[alive], cur.eq[alive])
        val, _ = support(others, cur.A[i])
        if not val <= cur.b[i] + tol:
            alive[i] = True
    return HalfspaceSystem(cur.vars, cur.A[alive], cur.b[alive], cur.eq[alive]).canonical()


def project(sys, eliminate, redundant=True):
    """Eliminate the variables in ``eliminate`` in the given order."""
    for v in eliminate:
        sys = fme_eliminate(sys, v)
        if redundant:
            sys = remove_redundant(sys)
        if sys.is_infeasible_marker():
            keep = tuple(u for u in sys.vars if u not in eliminate)
            return infeasible_system(keep)
    return sys


def farkas_certificate(sys, tol=REDUNDANCY_TOL):
    """Nonnegative row weights proving ``sys`` empty, or None.

    Solves  min y.b  s.t.  A^T y = 0, y >= 0, sum(y) = 1  with equality rows
    split into two opposite inequalities.  A negative optimum certifies
    emptiness: the weighted row sum reads ``0 <= y.b < 0``.  Weights are
    returned per original row (signed for equality rows).
    """
    if sys.nrows == 0:
        return None
    A = np.vstack([sys.A, -sys.A[sys.eq]])
    b = np.concatenate([sys.b, -sys.b[sys.eq]])
    m = len(b)
    A_eq = np.vstack([A.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(sys.dim), [1.0]])
    res = linprog(b, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds",
                  options=_LP_OPTIONS)
    if res.status != 0 or res.fun > -tol:
        return None
    y = res.x[:sys.nrows].copy()
    y[np.flatnonzero(sys.eq)] -= res.x[sys.nrows:]
    y[np.abs(y) < 1e-12] = 0.0
    return {"weights": y, "value": float(res.fun)}


# ---------------------------------------------------------------- vertices

def enumerate_vertices(sys, tol=VERTEX_TOL):
    """All vertices of a system in at most three variables."""
    if sys.dim > 3:
        raise UnsupportedError(f"vertex enumeration supports <= 3 variables, got {sys.dim}")
    if sys.is_infeasible_marker():
        return VertexSet(sys.vars, np.zeros((0, sys.dim)), tol)
    cand = kernels.vertex_candidates(sys.A, sys.b, sys.eq.astype(np.uint8), tol)
    kept = []
    for p in cand:
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    pts = np.array(kept, dtype=np.float64).reshape(-1, sys.dim)
    if len(pts):
        pts = pts[np.lexsort(pts.T[::-1])]
    return VertexSet(sys.vars, pts + 0.0, tol)


# ---------------------------------------------------------------- comparison

def support_directions(n, count=N_DIRECTIONS):
    """Fixed nonnegative unit directions: axes, the diagonal, then seeded."""
    dirs = [np.eye(n)[i] for i in range(n)]
    dirs.append(np.ones(n) / np.sqrt(n))
    rng = np.random.default_rng(_DIRECTION_SEED)
    while len(dirs) < count:
        w = np.abs(rng.standard_normal(n))
        dirs.append(w / np.linalg.norm(w))
    return np.array(dirs[:count])


@dataclass(frozen=True)
class Comparison:
    """Outcome of ``polytopes_equal``.

    ``a_in_b`` / ``b_in_a`` report containment up to tolerance; witnesses
    are points of one set outside the other.
    """
    a_in_b: bool
    b_in_a: bool
    witness_a: object = None  # point of a outside b
    witness_b: object = None  # point of b outside a
    gap: float = 0.0

    @property
    def equal(self):
        return self.a_in_b and self.b_in_a

    @property
    def direction(self):
        if self.equal:
            return "equal"
        if not self.a_in_b and not self.b_in_a:
            return "neither"
        return "a_not_in_b" if not self.a_in_b else "b_not_in_a"

    def to_json(self):
        def pt(p):
            return None if p is None else [float(c) for c in p]
        return {"direction": self.direction, "witness_a": pt(self.witness_a),
                "witness_b": pt(self.witness_b),
                "gap": "inf" if np.isinf(self.gap) else float(self.gap)}


def _one_way(a, b, va, dirs, tol):
    # is a inside b?  returns (ok, witness, gap)
    worst, witness = 0.0, None
    if va is not None and len(va.points):
        viol = b.violation(va.points)
        k = int(np.argmax(viol))
        if viol[k] > tol:
            worst, witness = float(viol[k]), va.points[k]
    for w in dirs:
        ha, xa = support(a, w)
        hb, _ = support(b, w)
        if ha - hb > tol and ha - hb > worst:
            worst = float(ha - hb) if np.isfinite(ha - hb) else np.inf
            witness = xa
    return witness is None, witness, worst


def polytopes_equal(a, b, tol=VERTEX_TOL):
    """Compare two systems over the same variables.

    Mutual vertex membership (dimension <= 3) plus support values on
    ``N_DIRECTIONS`` fixed nonnegative directions, all within ``tol``.
    """
    if a.vars != b.vars:
        raise ValueError(f"variable lists differ: {a.vars} vs {b.vars}")
    pa, pb = feasible_point(a), feasible_point(b)
    if pa is None or pb is None:
        if pa is None and pb is None:
            return Comparison(True, True)
        if pa is None:
            return Comparison(True, False, witness_b=pb, gap=np.inf)
        return Comparison(False, True, witness_a=pa, gap=np.inf)
    dirs = support_directions(a.dim)
    va = enumerate_vertices(a) if a.dim <= 3 else None
    vb = enumerate_vertices(b) if b.dim <= 3 else None
    ok_ab, wa, ga = _one_way(a, b, va, dirs, tol)
    ok_ba, wb, gb = _one_way(b, a, vb, dirs, tol)
    return Comparison(ok_ab, ok_ba, wa, wb, max(ga, gb))
