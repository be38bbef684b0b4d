"""Corner-rate bounds for the Gaussian relay broadcast channel.

Channel:  Y1 = g01 X + Z1,  Y2 = g02 X + g12 X1 + Z2,  Z1, Z2 ~ N(0, 1),
with E[X^2] <= P at the transmitter and E[X1^2] <= P1 at the relaying
receiver 1.  Each bound is the largest R2 with R0 = R1 = 0 that a scheme
supports, maximized over a jointly Gaussian input family:

    X1 ~ N(0, P1)
    U0 = sqrt(beta P / P1) X1 + V0,     Var V0 = gamma (1 - beta) P
    X  = U0 + V2,                       Var V2 = (1 - gamma) (1 - beta) P
    Yh1 = Y1 + Zh,                      Zh ~ N(0, nhat)

nhat = inf means Yh1 carries nothing.  Every rate expression is evaluated
through ``gaussian_cond_mi`` on the whole parameter grid at once.

The search is a deterministic grid: step 0.02 in beta and gamma, 40
log-spaced nhat values in [1e-3, 1e3], then two refinement rounds on a
local grid whose step shrinks 10x each round.  Ties go to the first grid
point in (beta, gamma, nhat) order.
"""
import math
from dataclasses import dataclass

import numpy as np

from .gauss import extend_linear, gaussian_cond_mi, independent
from .prob import DomainError, atom

__all__ = [
    "BoundResult",
    "GaussianParamPoint",
    "GaussianRbcParams",
    "TABLE1_HEADER",
    "cf_rate",
    "liang_pdf_rate",
    "rbc_system",
    "scheme1_rate",
    "table1",
    "table1_csv",
    "table1_json",
    "wu_rate",
]

GRID_STEP = 0.02
NHAT_RANGE = (1e-3, 1e3)
NHAT_POINTS = 40
REFINE_ROUNDS = 2
REFINE_HALF_WIDTH = 10  # local grid has 2 * 10 + 1 points per axis
TABLE1_HEADER = ("d", "liang", "scheme1", "wu", "cf")


@dataclass(frozen=True)
class GaussianRbcParams:
    """Channel gains, powers and feedback rates.

    Give either ``d`` (relay position: g01 = 1/d, g02 = 1, g12 = 1/|1-d|) or
    all three gains explicitly.
    """
    d: float = None
    g01: float = None
    g02: float = None
    g12: float = None
    P: float = 5.0
    P1: float = 1.0
    rfb1: float = math.inf
    rfb2: float = math.inf

    def __post_init__(self):
        if self.d is not None:
            d = float(self.d)
            if not math.isfinite(d) or d in (0.0, 1.0):
                raise DomainError("d must differ from 0 and 1")
            object.__setattr__(self, "g01", 1.0 / abs(d))
            object.__setattr__(self, "g02", 1.0)
            object.__setattr__(self, "g12", 1.0 / abs(1.0 - d))
        elif None in (self.g01, self.g02, self.g12):
            raise DomainError("give either d or all of g01, g02, g12")
        for name in ("P", "P1", "rfb1", "rfb2"):
            if not float(getattr(self, name)) >= 0:
                raise DomainError(f"{name} must be nonnegative")

    def with_(self, **kw):
        base = dict(P=self.P, P1=self.P1, rfb1=self.rfb1, rfb2=self.rfb2)
        if self.d is not None:
            base["d"] = self.d
        else:
            base.update(g01=self.g01, g02=self.g02, g12=self.g12)
        base.update(kw)
        return GaussianRbcParams(**base)


@dataclass(frozen=True)
class GaussianParamPoint:
    beta: float
    gamma: float
    nhat: float

    def to_json(self):
        return {"beta": round(float(self.beta), 10), "gamma": round(float(self.gamma), 10),
                "nhat": "inf" if math.isinf(self.nhat) else float(f"{self.nhat:.10g}")}


@dataclass(frozen=True)
class BoundResult:
    rate: float
    argmax: GaussianParamPoint
    active_constraint: str

    def to_json(self):
        return {"rate": self.rate, "argmax": self.argmax.to_json(),
                "active_constraint": self.active_constraint}


def rbc_system(p, beta, gamma, nhat):
    """Jointly Gaussian (X1, U0, X, Y1, Y2, Yh1) for the given (batched) parameters."""
    beta, gamma, nhat = np.broadcast_arrays(*[np.asarray(v, dtype=np.float64)
                                              for v in (beta, gamma, nhat)])
    P, P1 = float(p.P), float(p.P1)
    a = np.sqrt(beta * P / P1) if P1 > 0 else np.zeros_like(beta)
    if P1 == 0:
        beta = np.zeros_like(beta)  # no relay power: nothing to correlate with
    sys = independent({"X1": np.full(beta.shape, P1)})
    sys = extend_linear(sys, "U0", {"X1": a}, gamma * (1 - beta) * P)
    sys = extend_linear(sys, "X", {"U0": 1.0}, (1 - gamma) * (1 - beta) * P)
    sys = extend_linear(sys, "Y1", {"X": p.g01}, 1.0)
    sys = extend_linear(sys, "Y2", {"X": p.g02, "X1": p.g12}, 1.0)
    off = np.isinf(nhat)
    sys = extend_linear(sys, "Yh1", {"Y1": np.where(off, 0.0, 1.0)}, np.where(off, 0.0, nhat))
    return sys


def _mi(sys, *texts):
    return sum(gaussian_cond_mi(sys, atom(t)) for t in texts)


# Each objective returns (branch values stacked on axis 0, feasibility mask).

def _liang_rows(p, beta, gamma, nhat=None):
    sys = rbc_system(p, beta, gamma, np.inf)
    r1 = _mi(sys, "I(X,X1;Y2)")
    r2 = _mi(sys, "I(U0;Y1|X1)", "I(X;Y2|X1,U0)")
    return np.stack([r1, r2]), np.ones(np.shape(r1), dtype=bool)


_LIANG_LABELS = ("I(X,X1;Y2)", "I(U0;Y1|X1) + I(X;Y2|X1,U0)")


def _scheme1_rows(p, beta, gamma, nhat, relaxed=False):
    sys = rbc_system(p, beta, gamma, nhat)
    r1 = _mi(sys, "I(X,X1;Y2)") - _mi(sys, "I(Yh1;Y1|U0,X,X1,Y2)")
    r2 = _mi(sys, "I(U0;Y1|X1)", "I(X;Yh1,Y2|U0,X1)")
    fb = _mi(sys, "I(Yh1;Y1|U0,X1,Y2)" if relaxed else "I(Yh1;Y1|U0,X1)")
    return np.stack([r1, r2]), fb <= p.rfb1


_SCHEME1_LABELS = ("I(X,X1;Y2) - I(Yh1;Y1|U0,X,X1,Y2)", "I(U0;Y1|X1) + I(X;Yh1,Y2|U0,X1)")


def _cf_rows(p, beta, gamma, nhat, feedback=None):
    sys = rbc_system(p, 0.0 * beta, 0.0 * gamma, nhat)
    r1 = _mi(sys, "I(X;Yh1,Y2|X1)")
    r2 = _mi(sys, "I(X,X1;Y2)") - _mi(sys, "I(Yh1;Y1|X,X1,Y2)")
    ok = np.ones(np.shape(r1), dtype=bool)
    if feedback is not None:
        ok = _mi(sys, feedback) <= p.rfb1
    return np.stack([r1, r2]), ok


_CF_LABELS = ("I(X;Yh1,Y2|X1)", "I(X,X1;Y2) - I(Yh1;Y1|X,X1,Y2)")


# ---------------------------------------------------------------- optimizer

class _Axis:
    def __init__(self, lo, hi, step=None, count=None, log=False, fixed=None):
        self.lo, self.hi, self.log, self.fixed = lo, hi, log, fixed
        if fixed is not None:
            self.step = 0.0
        elif log:
            self.step = (math.log10(hi) - math.log10(lo)) / (count - 1)
        else:
            self.step = step

    def coarse(self):
        if self.fixed is not None:
            return np.array([self.fixed])
        if self.log:
            n = int(round((math.log10(self.hi) - math.log10(self.lo)) / self.step)) + 1
            return np.logspace(math.log10(self.lo), math.log10(self.hi), n)
        n = int(round((self.hi - self.lo) / self.step)) + 1
        return np.linspace(self.lo, self.hi, n)

    def local(self, center, step):
        if self.fixed is not None:
            return np.array([self.fixed])
        k = np.arange(-REFINE_HALF_WIDTH, REFINE_HALF_WIDTH + 1)
        if self.log:
            pts = 10.0 ** np.clip(math.log10(center) + k * step,
                                  math.log10(self.lo), math.log10(self.hi))
        else:
            pts = np.clip(center + k * step, self.lo, self.hi)
        return np.unique(pts)


def _search(rows_fn, axes):
    """Maximize min over branches; returns (value, point, active branch)."""
    best = None
    grids = [ax.coarse() for ax in axes]
    steps = [ax.step for ax in axes]
    for rnd in range(REFINE_ROUNDS + 1):
        if rnd:
            steps = [s / 10 for s in steps]
            grids = [ax.local(c, s) for ax, c, s in zip(axes, best[1], steps)]
        mesh = np.meshgrid(*grids, indexing="ij")
        rows, ok = rows_fn(*mesh)
        val = np.where(ok, rows.min(axis=0), -np.inf)
        flat = int(np.argmax(val))
        v = float(val.flat[flat])
        if not np.isfinite(v):
            if best is None:
                return None
            continue
        point = tuple(float(m.flat[flat]) for m in mesh)
        branch = int(np.argmin(rows.reshape(rows.shape[0], -1)[:, flat]))
        if best is None or v > best[0]:
            best = (v, point, branch)
    return best


_BG = (_Axis(0.0, 1.0, GRID_STEP), _Axis(0.0, 1.0, GRID_STEP))


def _nhat_axis():
    return _Axis(*NHAT_RANGE, count=NHAT_POINTS, log=True)


def _result(found, labels, nhat_inf=False):
    v, pt, branch = found
    nhat = math.inf if nhat_inf else pt[2]
    return BoundResult(max(v, 0.0), GaussianParamPoint(pt[0], pt[1], nhat), labels[branch])


# ---------------------------------------------------------------- bounds

def wu_rate(p):
    """Point-to-point capacity of the transmitter to receiver 2 link."""
    sys = extend_linear(independent({"X": float(p.P)}), "Y2", {"X": p.g02}, 1.0)
    return BoundResult(gaussian_cond_mi(sys, atom("I(X;Y2)")),
                       GaussianParamPoint(0.0, 0.0, math.inf), "I(X;Y2)")


def liang_pdf_rate(p):
    """Partial decode-forward rate of the relay channel."""
    found = _search(lambda b, g: _liang_rows(p, b, g), _BG)
    v, (b, g), branch = found
    return _result((v, (b, g, math.inf), branch), _LIANG_LABELS, nhat_inf=True)


def cf_rate(p, nhat=None):
    """Compress-forward rate; ``nhat`` pins the compression noise (inf allowed)."""
    if nhat is not None:
        nhat = float(nhat)
        if not nhat >= 0:
            raise DomainError("nhat must be nonnegative")
        rows, _ = _cf_rows(p, np.zeros(1), np.zeros(1), np.array([nhat]))
        rows = rows[:, 0]
        k = int(np.argmin(rows))
        return BoundResult(max(float(rows[k]), 0.0), GaussianParamPoint(0.0, 0.0, nhat),
                           _CF_LABELS[k])
    found = _search(lambda n: _cf_rows(p, 0.0 * n, 0.0 * n, n), (_nhat_axis(),))
    v, (n,), branch = found
    inf_rows, _ = _cf_rows(p, np.zeros(1), np.zeros(1), np.array([np.inf]))
    if inf_rows[:, 0].min() > v:
        k = int(np.argmin(inf_rows[:, 0]))
        return BoundResult(float(inf_rows[k, 0]), GaussianParamPoint(0.0, 0.0, math.inf),
                           _CF_LABELS[k])
    return BoundResult(max(v, 0.0), GaussianParamPoint(0.0, 0.0, n), _CF_LABELS[branch])


def scheme1_rate(p, relaxed=False):
    """Hybrid decode-forward / compressed-feedback rate under the feedback cap.

    The best of three searches is returned: the full (beta, gamma, nhat)
    grid, the nhat = inf plane (the decode-forward search, always within the
    feedback cap) and the beta = gamma = 0 line (the compress-forward search,
    filtered by the feedback cap).  The two sub-searches make the degenerate
    identities with ``liang_pdf_rate`` and ``cf_rate`` hold exactly.
    """
    fb_atom = "I(Yh1;Y1|U0,X1,Y2)" if relaxed else "I(Yh1;Y1|U0,X1)"
    cands = []
    full = _search(lambda b, g, n: _scheme1_rows(p, b, g, n, relaxed), _BG + (_nhat_axis(),))
    if full is not None:
        cands.append(_result(full, _SCHEME1_LABELS))
    lg = liang_pdf_rate(p)
    cands.append(BoundResult(lg.rate, lg.argmax, _SCHEME1_LABELS[_LIANG_LABELS.index(
        lg.active_constraint)]))
    cf = _search(lambda n: _cf_rows(p, 0.0 * n, 0.0 * n, n, feedback=fb_atom), (_nhat_axis(),))
    if cf is not None:
        v, (n,), branch = cf
        cands.append(BoundResult(max(v, 0.0), GaussianParamPoint(0.0, 0.0, n),
                                 _SCHEME1_LABELS[1 - branch]))
    best = cands[0]
    for c in cands[1:]:
        if c.rate > best.rate:
            best = c
    return best


# ---------------------------------------------------------------- table

def table1(ds, p=None):
    """One row (d, liang, scheme1, wu, cf) of BoundResults per position d."""
    if not len(ds):
        raise DomainError("ds must be nonempty")
    p = p or GaussianRbcParams(d=0.5)
    out = []
    for d in ds:
        q = p.with_(d=float(d), g01=None, g02=None, g12=None)
        out.append({"d": float(d), "liang": liang_pdf_rate(q), "scheme1": scheme1_rate(q),
                    "wu": wu_rate(q), "cf": cf_rate(q)})
    return out


def table1_csv(rows):
    lines = [",".join(TABLE1_HEADER)]
    for r in rows:
        lines.append(",".join([f"{r['d']:g}"] + [f"{r[k].rate:.4f}" for k in TABLE1_HEADER[1:]]))
    return "\n".join(lines) + "\n"


def table1_json(rows, p=None):
    doc = {"columns": list(TABLE1_HEADER), "rows": []}
    if p is not None:
        doc["params"] = {"P": p.P, "P1": p.P1,
                         "rfb1": "inf" if math.isinf(p.rfb1) else p.rfb1}
    for r in rows:
        row = {"d": r["d"]}
        for k in TABLE1_HEADER[1:]:
            row[k] = {"rate": round(r[k].rate, 10), "argmax": r[k].argmax.to_json(),
                      "active_constraint": r[k].active_constraint}
        doc["rows"].append(row)
    return doc
