"""Rate-region templates and their numeric instantiation.

A region is a list of rows ``c0*R0 + c1*R1 + c2*R2 <= expr`` where ``expr``
is an ``MIExpr``: a signed sum of mutual-information atoms, feedback-rate
slots and ``min{0, .}`` terms.  Instantiating a template against an
``MIAssignment`` (atom values for one distribution) gives a polytope over
(R0, R1, R2) plus a verdict on the feedback-rate side constraints.
"""
import math
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gauss import gaussian_cond_mi
from .polytope import HalfspaceSystem
from .prob import CLAMP_TOL, DomainError, MIAtom, atom, cond_mutual_information

__all__ = [
    "MIAssignment",
    "MIExpr",
    "RATE_VARS",
    "RegionId",
    "RegionSpec",
    "assignment_from_gaussian",
    "assignment_from_pmf",
    "build_region",
    "expr",
    "instantiate_region",
    "relaxed_feedback_constraint",
    "swap_indices",
]

RATE_VARS = ("R0", "R1", "R2")
INDEX_SWAP = {"U1": "U2", "U2": "U1", "X1": "X2", "X2": "X1", "Y1": "Y2", "Y2": "Y1",
              "Yh1": "Yh2", "Yh2": "Yh1"}


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class MIExpr:
    """sum(coef * atom) + fb[0]*Rfb1 + fb[1]*Rfb2 + sum(min{0, m} for m in mins)."""
    terms: tuple = ()
    fb: tuple = (0.0, 0.0)
    mins: tuple = ()

    def atoms(self):
        out = {a for a, _ in self.terms}
        for m in self.mins:
            out |= m.atoms()
        return out

    def evaluate(self, values, rfb=(math.inf, math.inf)):
        """Numeric value; ``values`` maps MIAtom -> bits.

        Infinite feedback rates are allowed: inside a min-term they make the
        term 0, outside one they make the whole expression infinite.
        """
        total = math.fsum(c * values[a] for a, c in self.terms)
        for c, r in zip(self.fb, rfb):
            if c:
                total += c * r
        for m in self.mins:
            total += min(0.0, m.evaluate(values, rfb))
        return total

    def rename(self, mapping, swap_fb=False):
        fb = self.fb[::-1] if swap_fb else self.fb
        return MIExpr(tuple((a.rename(mapping), c) for a, c in self.terms), fb,
                      tuple(m.rename(mapping, swap_fb) for m in self.mins))

    def __add__(self, other):
        return MIExpr(_merge(self.terms + other.terms),
                      tuple(x + y for x, y in zip(self.fb, other.fb)),
                      self.mins + other.mins)

    def to_json(self):
        return {"terms": [{"coef": c, "atom": a.to_json()} for a, c in self.terms],
                "feedback": {"Rfb1": self.fb[0], "Rfb2": self.fb[1]},
                "min0": [m.to_json() for m in self.mins]}

    def __str__(self):
        parts = []
        for a, c in self.terms:
            parts.append(("+ " if c > 0 else "- ") + (f"{abs(c):g}*" if abs(c) != 1 else "")
                         + str(a))
        for k, c in enumerate(self.fb):
            if c:
                parts.append(("+ " if c > 0 else "- ") + f"Rfb{k + 1}")
        for m in self.mins:
            parts.append(f"+ min0({m})")
        s = " ".join(parts) or "0"
        return s[2:] if s.startswith("+ ") else s


def _merge(terms):
    acc = {}
    for a, c in terms:
        acc[a] = acc.get(a, 0.0) + c
    return tuple(sorted(((a, c) for a, c in acc.items() if c != 0), key=lambda t: t[0]))


_TOKEN = re.compile(r"\s*([+-])?\s*(I\([^)]*\)|min0\(|Rfb[12])")


def expr(text):
    """Parse e.g. ``"I(U0;Y1|X1) - I(U1;U2|U0) + min0(Rfb2 - I(Yh2;Y2|Y1))"``."""
    e, rest = _parse(text.strip())
    if rest.strip():
        raise DomainError(f"trailing text {rest!r} in expression {text!r}")
    return e


def _parse(s):
    terms, fb, mins = [], [0.0, 0.0], []
    while s and not s.startswith(")"):
        m = _TOKEN.match(s)
        if not m:
            raise DomainError(f"cannot parse expression near {s!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        tok = m.group(2)
        s = s[m.end():]
        if tok.startswith("I("):
            terms.append((atom(tok), sign))
        elif tok.startswith("Rfb"):
            fb[int(tok[3]) - 1] += sign
        else:
            if sign < 0:
                raise DomainError("negated min0 terms are not supported")
            inner, s = _parse(s)
            if not s.startswith(")"):
                raise DomainError("unbalanced min0(")
            s = s[1:]
            mins.append(inner)
        s = s.lstrip()
    return MIExpr(_merge(terms), tuple(fb), tuple(mins)), s


# ---------------------------------------------------------------- templates

class RegionId(str, Enum):
    THEOREM1 = "Theorem1"
    THEOREM2 = "Theorem2"
    THEOREM3V1 = "Theorem3v1"
    THEOREM3V2 = "Theorem3v2"
    LIANG = "Liang"
    WU = "Wu"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for r in cls:
            if r.value.lower() == str(value).lower():
                return r
        raise DomainError(f"unknown region {value!r}; expected one of {[r.value for r in cls]}")


@dataclass(frozen=True)
class RegionSpec:
    """Inequality template over (R0, R1, R2).

    rows: (coeffs, MIExpr, label) meaning coeffs . R <= MIExpr
    feasibility: (MIExpr, k, label) meaning MIExpr <= Rfb_k (k = 1 or 2)
    pinned: rate names fixed to zero (Wu's region has no common message)
    """
    id: RegionId
    rows: tuple
    feasibility: tuple = ()
    pinned: tuple = ()
    relaxed: bool = False

    def atoms(self):
        out = set()
        for _, e, _ in self.rows:
            out |= e.atoms()
        for e, _, _ in self.feasibility:
            out |= e.atoms()
        return out

    def to_json(self):
        return {
            "id": self.id.value,
            "relaxed_feedback": self.relaxed,
            "rows": [{"coeffs": dict(zip(RATE_VARS, map(float, c))), "rhs": e.to_json(),
                      "text": str(e), "label": lab} for c, e, lab in self.rows],
            "feasibility": [{"lhs": e.to_json(), "text": str(e), "slot": f"Rfb{k}",
                             "label": lab} for e, k, lab in self.feasibility],
            "pinned_zero": list(self.pinned),
        }


def swap_indices(spec, new_id=None):
    """Exchange user indices 1 and 2 in variables, rates and feedback slots."""
    rows = tuple(((c[0], c[2], c[1]), e.rename(INDEX_SWAP, True), lab)
                 for c, e, lab in spec.rows)
    feas = tuple((e.rename(INDEX_SWAP, True), 3 - k, lab) for e, k, lab in spec.feasibility)
    pinned = tuple({"R1": "R2", "R2": "R1"}.get(r, r) for r in spec.pinned)
    return RegionSpec(new_id or spec.id, rows, feas, pinned, spec.relaxed)


def _theorem1():
    a = expr("I(U0,U1;Y1|X1)")
    b = expr("I(U0,U2,X1;Y2) - I(Yh1;Y1|U0,U2,X1,Y2)")
    mart = expr("- I(U1;U2|U0,X1)")
    rows = (
        ((1, 1, 0), a, "R0+R1"),
        ((1, 0, 1), b, "R0+R2"),
        ((1, 1, 1), expr("I(U1;Y1|U0,X1)") + b + mart, "sum, private-1 route"),
        ((1, 1, 1), a + expr("I(U2;Yh1,Y2|U0,X1)") + mart, "sum, compressed-feedback route"),
        ((2, 1, 1), a + b + mart, "2R0+R1+R2"),
    )
    feas = ((expr("I(Yh1;Y1|U0,X1)"), 1, "compression rate fits feedback link 1"),)
    return RegionSpec(RegionId.THEOREM1, rows, feas)


def _liang():
    a = expr("I(U0,U1;Y1|X1)")
    b = expr("I(U0,U2,X1;Y2)")
    mart = expr("- I(U1;U2|U0,X1)")
    rows = (
        ((1, 1, 0), a, "R0+R1"),
        ((1, 0, 1), b, "R0+R2"),
        ((1, 1, 1), expr("I(U1;Y1|U0,X1)") + b + mart, "sum, private-1 route"),
        ((1, 1, 1), a + expr("I(U2;Y2|U0,X1)") + mart, "sum, private-2 route"),
        ((2, 1, 1), a + b + mart, "2R0+R1+R2"),
    )
    return RegionSpec(RegionId.LIANG, rows)


def _theorem2():
    d1 = expr("min0(I(X2;Y1|X1) - I(Yh2;Y2|X1,X2,Y1))")
    d2 = expr("min0(I(X1;Y2|X2) - I(Yh1;Y1|X1,X2,Y2))")
    r1 = expr("I(U0,U1;Yh2,Y1|X1,X2)") + d1
    r2 = expr("I(U0,U2;Yh1,Y2|X1,X2)") + d2
    mart = expr("- I(U1;U2|U0,X1,X2)")
    rows = (
        ((1, 1, 0), r1, "R0+R1"),
        ((1, 0, 1), r2, "R0+R2"),
        ((1, 1, 1), r1 + expr("I(U2;Y2,Yh1|U0,X1,X2)") + mart, "sum, receiver-1 common route"),
        ((1, 1, 1), r2 + expr("I(U1;Y1,Yh2|U0,X1,X2)") + mart, "sum, receiver-2 common route"),
        ((2, 1, 1), r1 + r2 + mart, "2R0+R1+R2"),
    )
    feas = ((expr("I(Yh1;Y1|X1)"), 1, "compression rate fits feedback link 1"),
            (expr("I(Yh2;Y2|X2)"), 2, "compression rate fits feedback link 2"))
    return RegionSpec(RegionId.THEOREM2, rows, feas)


def _wu():
    r1 = expr("I(U0,U1;Y1,Yh2) - I(Yh2;Y2|Y1)")
    r2 = expr("I(U0,U2;Y2,Yh1) - I(Yh1;Y1|Y2)")
    mart = expr("- I(U1;U2|U0)")
    rows = (
        ((0, 1, 0), r1, "R1"),
        ((0, 0, 1), r2, "R2"),
        ((0, 1, 1), r1 + expr("I(U2;Y2,Yh1|U0)") + mart, "sum, receiver-1 cloud route"),
        ((0, 1, 1), r2 + expr("I(U1;Y1,Yh2|U0)") + mart, "sum, receiver-2 cloud route"),
        ((0, 1, 1), r1 + r2 + mart, "sum, both clouds"),
    )
    feas = ((expr("I(Yh1;Y1|Y2)"), 1, "compression rate fits feedback link 1"),
            (expr("I(Yh2;Y2|Y1)"), 2, "compression rate fits feedback link 2"))
    return RegionSpec(RegionId.WU, rows, feas, pinned=("R0",))


def _theorem3v1():
    q = expr("I(U0;Y1|X1,X2) + min0(I(X2;Y1|X1) - I(Yh2;Y2|U0,X1,X2,Y1))")
    i1 = expr("I(U1;Yh2,Y1|U0,X1,X2) + min0(Rfb2 - I(Yh2;Y2|U0,X1,X2,Y1))")
    i2 = expr("I(U2;Yh1,Y2|U0,X1,X2) + min0(Rfb1 - I(Yh1;Y1|U0,X1,X2,Y2))")
    n = expr("I(U0,U2,X1;Y2|X2) - I(Yh1;Y1|U0,U2,X1,X2,Y2)")
    mart = expr("- I(U1;U2|U0,X1,X2)")
    rows = (
        ((1, 0, 0), q, "R0"),
        ((1, 1, 0), q + i1, "R0+R1"),
        ((1, 0, 1), q + i2, "R0+R2, decode-forward route"),
        ((1, 0, 1), n, "R0+R2, receiver-2 direct route"),
        ((1, 1, 1), q + n + mart, "sum, receiver-2 direct route"),
        ((1, 1, 1), q + i1 + i2 + mart, "sum, decode-forward route"),
    )
    feas = ((expr("I(Yh1;Y1|U0,X1,X2,Y2)"), 1, "compression rate fits feedback link 1"),
            (expr("I(Yh2;Y2|U0,X1,X2,Y1)"), 2, "compression rate fits feedback link 2"))
    return RegionSpec(RegionId.THEOREM3V1, rows, feas)


_BUILDERS = {
    RegionId.THEOREM1: _theorem1,
    RegionId.THEOREM2: _theorem2,
    RegionId.THEOREM3V1: _theorem3v1,
    RegionId.THEOREM3V2: lambda: swap_indices(_theorem3v1(), RegionId.THEOREM3V2),
    RegionId.LIANG: _liang,
    RegionId.WU: _wu,
}


def build_region(region_id):
    return _BUILDERS[RegionId.parse(region_id)]()


def relaxed_feedback_constraint(spec):
    """Theorem 1 with the feedback constraint conditioned additionally on Y2
    (Wyner-Ziv compression of the feedback)."""
    if spec.id is not RegionId.THEOREM1:
        raise DomainError(f"relaxed feedback constraint is defined for Theorem1 only, "
                          f"not {spec.id.value}")
    if spec.relaxed:
        return spec
    feas = ((expr("I(Yh1;Y1|U0,X1,Y2)"), 1, "Wyner-Ziv compression rate fits feedback link 1"),)
    return RegionSpec(spec.id, spec.rows, feas, spec.pinned, relaxed=True)


# ---------------------------------------------------------------- assignments

@dataclass(frozen=True)
class MIAssignment:
    """Numeric values (bits) for a set of atoms, tagged with their source."""
    values: dict = field(repr=False)
    source: str = "pmf"

    def __post_init__(self):
        vals = {}
        for a, v in self.values.items():
            a = atom(a) if isinstance(a, str) else a
            v = float(v)
            if not v >= -CLAMP_TOL:
                raise DomainError(f"{a} has negative value {v}")
            vals[a] = max(v, 0.0)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, a):
        a = atom(a) if isinstance(a, str) else a
        try:
            return self.values[a]
        except KeyError:
            raise DomainError(f"assignment has no value for {a}") from None

    def __contains__(self, a):
        return (atom(a) if isinstance(a, str) else a) in self.values

    def missing(self, atoms):
        return sorted(a for a in atoms if a not in self.values)

    def require(self, atoms):
        miss = self.missing(atoms)
        if miss:
            raise DomainError("assignment is missing atoms: " + ", ".join(map(str, miss)))

    def merged(self, other):
        return MIAssignment({**self.values, **other.values}, self.source)

    def to_json(self):
        return {"source": self.source,
                "values": [{"atom": a.to_json(), "text": str(a), "bits": v}
                           for a, v in sorted(self.values.items(), key=lambda t: t[0])]}


def assignment_from_pmf(p, atoms):
    return MIAssignment({a: cond_mutual_information(p, a) for a in atoms}, "pmf")


def assignment_from_gaussian(sys, atoms):
    return MIAssignment({a: gaussian_cond_mi(sys, a) for a in atoms}, "gaussian")


def instantiate_region(spec, a, rfb1=math.inf, rfb2=math.inf):
    """Polytope over (R0, R1, R2) and the feedback feasibility verdict.

    Rows whose right side evaluates to +inf are omitted.  Nonnegativity of
    every rate is appended, and pinned rates get an equality row.
    """
    a.require(spec.atoms())
    for r in (rfb1, rfb2):
        if not r >= 0:
            raise DomainError(f"feedback rates must be nonnegative, got {r}")
    rfb = (float(rfb1), float(rfb2))
    rows = []
    for coeffs, e, label in spec.rows:
        rhs = e.evaluate(a.values, rfb)
        if math.isinf(rhs) and rhs > 0:
            continue
        rows.append((dict(zip(RATE_VARS, coeffs)), "<=", rhs, label))
    for r in spec.pinned:
        rows.append(({r: 1.0}, "=", 0.0, f"{r} pinned to 0"))
    for r in RATE_VARS:
        rows.append(({r: 1.0}, ">=", 0.0, f"{r} >= 0"))
    feasible = all(e.evaluate(a.values, rfb) <= rfb[k - 1] for e, k, _ in spec.feasibility)
    return HalfspaceSystem.from_rows(RATE_VARS, rows), feasible


def evaluate_rows(spec, a, rfb1=math.inf, rfb2=math.inf):
    """Right-hand sides of the template rows, in order (for diagnostics)."""
    a.require(spec.atoms())
    return np.array([e.evaluate(a.values, (rfb1, rfb2)) for _, e, _ in spec.rows])
