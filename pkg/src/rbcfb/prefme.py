"""Achievability constraint systems before Fourier-Motzkin elimination.

Each coding scheme yields a linear system over the message rates (R0, R1,
R2), their common/private splits (Rc1, Rc2, Rp1, Rp2), Marton binning rates
(Rpr1, Rpr2), feedback compression rates (Rh1, Rh2) and, for the hybrid
scheme, compression bin rates (Rt1, Rt2).  Projecting it onto (R0, R1, R2)
and comparing with the closed-form theorem region checks the elimination
mechanically for one distribution at a time.

Rc stands for R0 + Rc1 + Rc2 and is expanded in every row.
"""
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .polytope import (HalfspaceSystem, farkas_certificate, is_empty, polytopes_equal,
                       project, remove_redundant)
from .prob import (JointPmf, Scheme, StructuredFamilySpec, random_structured_pmf)
from .regions import (RATE_VARS, RegionId, assignment_from_pmf, build_region, expr,
                      instantiate_region)

__all__ = [
    "ELIMINATION_ORDER",
    "SchemeSystem",
    "THEOREM_FOR_SCHEME",
    "build_scheme_system",
    "project_to_rates",
    "scheme_atoms",
    "side_condition_example",
    "verify_theorem",
    "verify_trial",
]

ELIMINATION_ORDER = ("Rpr1", "Rpr2", "Rh1", "Rh2", "Rt1", "Rt2", "Rc1", "Rc2", "Rp1", "Rp2")

THEOREM_FOR_SCHEME = {
    Scheme.SCHEME1: RegionId.THEOREM1,
    Scheme.SCHEME2A: RegionId.THEOREM2,
    Scheme.SCHEME2B: RegionId.THEOREM3V1,
}

_AUX = {
    Scheme.SCHEME1: ("Rc1", "Rc2", "Rp1", "Rp2", "Rpr1", "Rpr2", "Rh1"),
    Scheme.SCHEME2A: ("Rc1", "Rc2", "Rp1", "Rp2", "Rpr1", "Rpr2", "Rh1", "Rh2"),
    Scheme.SCHEME2B: ("Rc1", "Rc2", "Rp1", "Rp2", "Rpr1", "Rpr2", "Rh1", "Rh2", "Rt1", "Rt2"),
}

RC = ("R0", "Rc1", "Rc2")

# (lhs rate names, relation, rhs expression, label); "Rc" expands to RC
_SCHEME1_ROWS = (
    (("Rpr1", "Rpr2"), ">=", "I(U1;U2|U0,X1)", "Marton covering"),
    (("Rp1", "Rpr1"), "<=", "I(U1;Y1|U0,X1)", "receiver 1 decodes U1"),
    (("Rp1", "Rpr1", "Rc"), "<=", "I(U0,U1;Y1|X1)", "receiver 1 decodes U0,U1"),
    (("Rh1",), ">=", "I(Yh1;Y1|U0,X1)", "receiver 1 compression covering"),
    (("Rp2", "Rpr2"), "<=", "I(U2;Y2,Yh1|U0,X1)", "receiver 2 decodes U2"),
    (("Rp2", "Rpr2", "Rc", "Rh1"), "<=", "I(U0,U2,X1;Y2) + I(Yh1;U2,Y2|U0,X1)",
     "receiver 2 decodes U0,U2 and the feedback index"),
)

_SCHEME2A_COMMON = (
    (("Rpr1", "Rpr2"), ">=", "I(U1;U2|U0,X1,X2)", "Marton covering"),
    (("Rh1",), ">=", "I(Yh1;Y1|X1)", "receiver 1 compression covering"),
    (("Rh2",), ">=", "I(Yh2;Y2|X2)", "receiver 2 compression covering"),
    (("Rp1", "Rpr1"), "<=", "I(U1;Y1,Yh2|U0,X1,X2)", "receiver 1 decodes U1"),
    (("Rp2", "Rpr2"), "<=", "I(U2;Y2,Yh1|U0,X1,X2)", "receiver 2 decodes U2"),
    (("Rp1", "Rpr1", "Rc"), "<=", "I(U0,U1;Yh2,Y1|X1,X2)", "receiver 1 decodes U0,U1"),
    (("Rp2", "Rpr2", "Rc"), "<=", "I(U0,U2;Yh1,Y2|X1,X2)", "receiver 2 decodes U0,U2"),
)

# The compression-index rows.  The default pairs each receiver's own
# auxiliary with the other receiver's compression (the pairing the Delta
# terms of the closed-form region follow from); swapped_2a pairs each
# receiver with the other auxiliary.
_SCHEME2A_INDEX = (
    (("Rp1", "Rpr1", "Rc", "Rh2"), "<=", "I(U0,U1,X2;Y1|X1) + I(Yh2;U0,U1,Y1,X1|X2)",
     "receiver 1 decodes U0,U1 and the feedback index of receiver 2"),
    (("Rp2", "Rpr2", "Rc", "Rh1"), "<=", "I(U0,U2,X1;Y2|X2) + I(Yh1;U0,U2,Y2,X2|X1)",
     "receiver 2 decodes U0,U2 and the feedback index of receiver 1"),
)
_SCHEME2A_INDEX_SWAPPED = (
    (("Rp1", "Rpr1", "Rc", "Rh2"), "<=", "I(U0,U1,X2;Y1|X1) + I(Yh2;U0,U2,Y1,X1|X2)",
     "receiver 1 decodes U0,U1 and the feedback index of receiver 2 (U1, U2 swapped)"),
    (("Rp2", "Rpr2", "Rc", "Rh1"), "<=", "I(U0,U2,X1;Y2|X2) + I(Yh1;U0,U1,Y2,X2|X1)",
     "receiver 2 decodes U0,U2 and the feedback index of receiver 1 (U1, U2 swapped)"),
)

_SCHEME2B_ROWS = (
    (("Rpr1", "Rpr2"), ">=", "I(U1;U2|U0,X1,X2)", "Marton covering"),
    (("Rc",), "<=", "I(U0;Y1|X1,X2)", "receiver 1 decodes the cloud center"),
    (("Rc", "Rh2"), "<=", "I(U0,X2;Y1|X1)", "receiver 1 decodes cloud center and X2 index"),
    (("Rt2",), "<=", "I(Yh2;U0,X1,Y1|X2)", "receiver 1 resolves the receiver-2 bin index"),
    (("Rp1", "Rpr1"), "<=", "I(U1;Y1,Yh2|U0,X1,X2)", "receiver 1 decodes U1"),
    (("Rp1", "Rpr1", "Rt2"), "<=", "I(U1;Y1,Yh2|U0,X1,X2) + I(Yh2;U0,X1,Y1|X2)",
     "receiver 1 decodes U1 and the receiver-2 bin index"),
    (("Rh1", "Rt1"), ">=", "I(Yh1;Y1|U0,X1,X2)", "receiver 1 compression covering"),
    (("Rt1",), "<=", "I(Yh1;Y2,U2|U0,X1,X2)", "receiver 2 resolves the receiver-1 bin index"),
    (("Rp2", "Rpr2"), "<=", "I(U2;Y2,Yh1|U0,X1,X2)", "receiver 2 decodes U2"),
    (("Rp2", "Rpr2", "Rt1"), "<=", "I(U2;Y2,Yh1|U0,X1,X2) + I(Yh1;Y2|U0,X1,X2)",
     "receiver 2 decodes U2 and the receiver-1 bin index"),
    (("Rc", "Rh1", "Rp2", "Rpr2", "Rt1"), "<=", "I(Yh1;Y2,U2|U0,X1,X2) + I(U0,U2,X1;Y2|X2)",
     "receiver 2 decodes everything in the window"),
    (("Rh2", "Rt2"), ">=", "I(Yh2;Y2|X2)", "receiver 2 compression covering"),
)


def _rows(scheme, swapped_2a=False):
    if scheme is Scheme.SCHEME1:
        return _SCHEME1_ROWS
    if scheme is Scheme.SCHEME2A:
        return _SCHEME2A_COMMON + (_SCHEME2A_INDEX_SWAPPED if swapped_2a else _SCHEME2A_INDEX)
    return _SCHEME2B_ROWS


def scheme_atoms(scheme, swapped_2a=False):
    scheme = Scheme.parse(scheme)
    out = set()
    for _, _, rhs, _ in _rows(scheme, swapped_2a):
        out |= expr(rhs).atoms()
    return out


@dataclass(frozen=True)
class SchemeSystem:
    scheme: Scheme
    sys: HalfspaceSystem
    assignment: object
    rfb1: float
    rfb2: float

    @property
    def eliminate(self):
        return tuple(v for v in ELIMINATION_ORDER if v in self.sys.vars)


def build_scheme_system(scheme, a, rfb1=math.inf, rfb2=math.inf, swapped_2a=False):
    """The scheme's full constraint system for the atom values ``a``.

    Rows with "<" or ">" are stored non-strict, ">" rows flipped into "<=".
    Feedback caps Rh_k <= Rfb_k are omitted when Rfb_k is infinite.
    """
    scheme = Scheme.parse(scheme)
    a.require(scheme_atoms(scheme, swapped_2a))
    vars_ = RATE_VARS + _AUX[scheme]
    rows = [
        ({"R1": 1, "Rc1": -1, "Rp1": -1}, "=", 0.0, "R1 splits into Rc1 + Rp1"),
        ({"R2": 1, "Rc2": -1, "Rp2": -1}, "=", 0.0, "R2 splits into Rc2 + Rp2"),
    ]
    for names, rel, rhs, label in _rows(scheme, swapped_2a):
        coeffs = {}
        for n in names:
            for v in (RC if n == "Rc" else (n,)):
                coeffs[v] = coeffs.get(v, 0) + 1
        rows.append((coeffs, rel, expr(rhs).evaluate(a.values), label))
    for k, r in ((1, rfb1), (2, rfb2)):
        if f"Rh{k}" in vars_ and not math.isinf(r):
            rows.append(({f"Rh{k}": 1}, "<=", float(r), f"feedback link {k} capacity"))
    for v in vars_:
        rows.append(({v: 1}, ">=", 0.0, f"{v} >= 0"))
    return SchemeSystem(scheme, HalfspaceSystem.from_rows(vars_, rows), a,
                        float(rfb1), float(rfb2))


def project_to_rates(s):
    """Eliminate every auxiliary rate; the result lives over (R0, R1, R2)."""
    out = project(s.sys, s.eliminate)
    if out.vars != RATE_VARS:
        raise AssertionError(f"projection left variables {out.vars}")
    return remove_redundant(out.nonnegative())


# ---------------------------------------------------------------- verification

def side_condition_example():
    """Smallest Scheme-1 distribution whose constraint system is empty.

    U0 and U1 = U2 are independent uniform bits, X = U0, Y1 = Y2 = X, and X1,
    Yh1 are constant.  Neither receiver learns anything about U1 = U2, yet
    Marton covering needs Rpr1 + Rpr2 >= I(U1;U2|U0,X1) = 1 bit, so no rate
    tuple is achievable by the scheme, while the closed-form region is the
    single point (0, 0, 0).
    """
    names = ("U0", "U1", "U2", "X1", "X", "Y1", "Y2", "Yh1")
    probs = np.zeros((2, 2, 2, 1, 2, 2, 2, 1))
    for u0 in range(2):
        for u in range(2):
            probs[u0, u, u, 0, u0, u0, u0, 0] = 0.25
    return JointPmf(names, probs)


def _rows_violated(sys, x, tol=1e-8):
    out = []
    for i in np.flatnonzero((x @ sys.A.T - sys.b) > tol):
        out.append({"row": int(i), "coeffs": dict(zip(sys.vars, map(float, sys.A[i]))),
                    "rhs": float(sys.b[i]), "excess": float(sys.A[i] @ x - sys.b[i])})
    return out


def verify_trial(scheme, pmf, rfb1=math.inf, rfb2=math.inf, swapped_2a=False, tol=1e-8):
    """Compare projection and theorem region for one distribution.

    Returns a dict with the verdict and, for a mismatch, its direction,
    witness and explanation.  A mismatch is explained when the scheme's own
    constraint system is already empty (a Farkas certificate names the rows
    involved) or when the theorem's feedback side constraint fails.
    """
    scheme = Scheme.parse(scheme)
    spec = build_region(THEOREM_FOR_SCHEME[scheme])
    a = assignment_from_pmf(pmf, scheme_atoms(scheme, swapped_2a) | spec.atoms())
    s = build_scheme_system(scheme, a, rfb1, rfb2, swapped_2a)
    proj = project_to_rates(s)
    theo, fb_ok = instantiate_region(spec, a, rfb1, rfb2)
    pre_empty = is_empty(s.sys)
    cmp = polytopes_equal(theo, proj, tol)
    out = {"verdict": "equal" if cmp.equal else "mismatch",
           "pre_elimination_feasible": not pre_empty,
           "theorem_nonempty": not is_empty(theo),
           "theorem_feedback_feasible": bool(fb_ok)}
    if cmp.equal:
        return out
    direction = {"a_not_in_b": "theorem_not_in_projection",
                 "b_not_in_a": "projection_not_in_theorem",
                 "neither": "neither"}[cmp.direction]
    out["direction"] = direction
    out["gap"] = _num(cmp.gap)
    w = cmp.witness_a if cmp.witness_a is not None else cmp.witness_b
    out["witness"] = [float(c) for c in w]
    if cmp.witness_a is not None:
        out["violated_projection_rows"] = _rows_violated(proj, cmp.witness_a, tol)
    if cmp.witness_b is not None:
        out["violated_theorem_rows"] = [
            dict(r, label=spec.rows[r["row"]][2]) if r["row"] < len(spec.rows) else r
            for r in _rows_violated(theo, cmp.witness_b, tol)]
    if pre_empty:
        cert = farkas_certificate(s.sys)
        used = [] if cert is None else [
            {"label": s.sys.labels[i], "weight": float(cert["weights"][i])}
            for i in np.flatnonzero(cert["weights"])]
        out["explanation"] = "scheme constraint system is empty for this distribution"
        out["certificate"] = {"rows": used,
                              "value": None if cert is None else cert["value"]}
    elif not fb_ok:
        out["explanation"] = "theorem feedback constraint fails; theorem claims no region"
    return out


def _trial_job(args):
    scheme, index, seed, sizes, rfb1, rfb2, swapped_2a, indep = args
    spec = StructuredFamilySpec(scheme, sizes=dict(sizes), seed=seed + index,
                                independent_auxiliaries=indep)
    res = verify_trial(scheme, random_structured_pmf(spec), rfb1, rfb2, swapped_2a)
    res["trial"] = index
    res["seed"] = seed + index
    return res


def _workers(n_jobs):
    env = os.environ.get("RBC_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


def verify_theorem(scheme, trials, seed, sizes=None, rfb1=math.inf, rfb2=math.inf,
                   swapped_2a=False, independent_auxiliaries=False, workers=None):
    """Run ``trials`` seeded comparisons (trial i uses seed + i).

    The report lists one verdict per trial and the details of every
    mismatch, sorted by trial index so it does not depend on scheduling.
    """
    scheme = Scheme.parse(scheme)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sizes = tuple(sorted((sizes or {}).items()))
    jobs = [(scheme, i, int(seed), sizes, rfb1, rfb2, swapped_2a, independent_auxiliaries)
            for i in range(trials)]
    n = workers or _workers(trials)
    if n > 1:
        with ProcessPoolExecutor(n) as ex:
            results = list(ex.map(_trial_job, jobs, chunksize=max(1, trials // (4 * n))))
    else:
        results = [_trial_job(j) for j in jobs]
    results.sort(key=lambda r: r["trial"])
    verdicts, mismatches = [], []
    for r in results:
        v = {"trial": r["trial"], "seed": r["seed"], "verdict": r["verdict"],
             "pre_elimination_feasible": r["pre_elimination_feasible"],
             "theorem_nonempty": r["theorem_nonempty"]}
        if r["verdict"] != "equal":
            v["explained"] = "explanation" in r
            m = {k: r[k] for k in r if k not in ("verdict", "pre_elimination_feasible",
                                                  "theorem_feedback_feasible", "seed",
                                                  "theorem_nonempty")}
            m["explained"] = "explanation" in r
            mismatches.append(m)
        verdicts.append(v)
    summary = {
        "equal": sum(v["verdict"] == "equal" for v in verdicts),
        "theorem_nonempty": sum(v["theorem_nonempty"] for v in verdicts),
        "mismatch": len(mismatches),
        "explained": sum(m["explained"] for m in mismatches),
        "unexplained": sum(not m["explained"] for m in mismatches),
        "theorem_not_in_projection": sum(m["direction"] in ("theorem_not_in_projection", "neither")
                                         for m in mismatches),
        "theorem_not_in_projection_unexplained": sum(
            m["direction"] in ("theorem_not_in_projection", "neither") and not m["explained"]
            for m in mismatches),
    }
    return {"scheme": scheme.value, "theorem": THEOREM_FOR_SCHEME[scheme].value,
            "trials": trials, "seed": int(seed),
            "rfb1": _num(rfb1), "rfb2": _num(rfb2), "sizes": dict(sizes),
            "swapped_2a_rows": swapped_2a,
            "independent_auxiliaries": bool(independent_auxiliaries), "summary": summary,
            "verdicts": verdicts, "mismatches": mismatches}


def _num(x):
    return "inf" if math.isinf(x) else float(x)
