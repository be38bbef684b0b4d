"""Exact discrete probability and information measures.

Joint pmfs are dense numpy tensors with one named axis per random variable.
All information quantities are in bits.
"""
from dataclasses import dataclass, field
from enum import Enum
import re

import numpy as np

__all__ = [
    "DomainError",
    "InternalConsistencyError",
    "JointPmf",
    "MIAtom",
    "Scheme",
    "StructuredFamilySpec",
    "SCHEME_VARIABLES",
    "atom",
    "cond_mutual_information",
    "entropy",
    "marginalize",
    "random_structured_pmf",
]

# Canonical display/sort order for the variables used by the regions.
VARIABLE_ORDER = ("U0", "U1", "U2", "X", "X1", "X2", "Y1", "Y2", "Yh1", "Yh2")

SUM_TOL = 1e-12
CLAMP_TOL = 1e-12


class DomainError(ValueError):
    """Invalid argument: unknown variable, malformed atom, bad spec."""


class InternalConsistencyError(ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""


def _var_key(name):
    try:
        return (0, VARIABLE_ORDER.index(name), name)
    except ValueError:
        return (1, 0, name)


def sort_vars(names):
    return tuple(sorted(names, key=_var_key))


@dataclass(frozen=True)
class JointPmf:
    """Joint pmf over named finite random variables.

    ``probs`` has one axis per entry of ``names``; axis length is the
    alphabet size.
    """

    names: tuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = tuple(self.names)
        probs = np.array(self.probs, dtype=np.float64)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names in {names}")
        if probs.ndim != len(names):
            raise DomainError(
                f"probability tensor has {probs.ndim} axes for {len(names)} variables")
        if any(s < 1 for s in probs.shape):
            raise DomainError("alphabet sizes must be >= 1")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError("probabilities must be finite and nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL * max(1, probs.size):
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "probs", probs)

    @property
    def sizes(self):
        return dict(zip(self.names, self.probs.shape))

    def axis(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"unknown variable {name!r}; have {self.names}") from None

    def to_json(self):
        return {
            "variables": [{"name": n, "size": s} for n, s in zip(self.names, self.probs.shape)],
            "probs": self.probs.ravel(order="C").tolist(),
        }

    @classmethod
    def from_json(cls, doc):
        try:
            names = [v["name"] for v in doc["variables"]]
            sizes = [int(v["size"]) for v in doc["variables"]]
            flat = np.asarray(doc["probs"], dtype=np.float64)
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed pmf document: {exc}") from None
        if flat.size != int(np.prod(sizes)):
            raise DomainError(
                f"pmf has {flat.size} entries, alphabet sizes {sizes} need {int(np.prod(sizes))}")
        return cls(tuple(names), flat.reshape(sizes))


def marginalize(p, keep):
    """Marginal pmf on ``keep``; axes stay in ``p``'s order."""
    keep = set(keep)
    for name in keep:
        p.axis(name)
    drop = tuple(i for i, n in enumerate(p.names) if n not in keep)
    names = tuple(n for n in p.names if n in keep)
    return JointPmf(names, p.probs.sum(axis=drop) if drop else p.probs)


def entropy(p, variables=None):
    """Joint entropy H(variables) in bits, with 0 log 0 = 0."""
    if variables is None:
        q = p.probs
    else:
        variables = set(variables)
        if not variables:
            return 0.0
        q = marginalize(p, variables).probs
    q = q[q > 0]
    return float(-(q * np.log2(q)).sum())


@dataclass(frozen=True)
class MIAtom:
    """A conditional mutual information term I(left; right | cond).

    Atoms are symmetric in ``left``/``right``; the constructor orders the two
    sides canonically so I(A;B|C) and I(B;A|C) compare equal.
    """

    left: frozenset
    right: frozenset
    cond: frozenset = frozenset()

    def __post_init__(self):
        left, right, cond = frozenset(self.left), frozenset(self.right), frozenset(self.cond)
        if not left or not right:
            raise DomainError("mutual information needs nonempty left and right sets")
        if left & right or left & cond or right & cond:
            raise DomainError(
                f"variable sets overlap in I({_fmt(left)};{_fmt(right)}|{_fmt(cond)})")
        if _set_key(right) < _set_key(left):
            left, right = right, left
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "cond", cond)

    @property
    def variables(self):
        return self.left | self.right | self.cond

    def rename(self, mapping):
        def m(s):
            return frozenset(mapping.get(v, v) for v in s)
        return MIAtom(m(self.left), m(self.right), m(self.cond))

    def to_json(self):
        return {"left": list(sort_vars(self.left)),
                "right": list(sort_vars(self.right)),
                "cond": list(sort_vars(self.cond))}

    def __str__(self):
        s = f"I({_fmt(self.left)};{_fmt(self.right)}"
        return s + (f"|{_fmt(self.cond)})" if self.cond else ")")

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (_set_key(self.left), _set_key(self.right), _set_key(self.cond))


def _set_key(s):
    return tuple(_var_key(v) for v in sort_vars(s))


def _fmt(s):
    return ",".join(sort_vars(s))


_ATOM_RE = re.compile(r"^\s*I\(\s*([^;|()]+);([^;|()]+)(?:\|([^;|()]*))?\)\s*$")


def atom(text):
    """Parse ``"I(U0,U1;Y1|X1)"`` into an MIAtom."""
    m = _ATOM_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse atom {text!r}")

    def names(s):
        return frozenset(t.strip() for t in (s or "").split(",") if t.strip())

    return MIAtom(names(m.group(1)), names(m.group(2)), names(m.group(3)))


def cond_mutual_information(p, a):
    """I(left; right | cond) in bits for the pmf ``p``.

    Computed as H(L,C) + H(R,C) - H(L,R,C) - H(C).  Values within 1e-12
    of zero (either sign) are rounding residue and returned as exactly 0;
    anything more negative signals a numerical problem and raises
    InternalConsistencyError.
    """
    if isinstance(a, str):
        a = atom(a)
    for name in a.variables:
        p.axis(name)
    L, R, C = a.left, a.right, a.cond
    value = entropy(p, L | C) + entropy(p, R | C) - entropy(p, L | R | C) - entropy(p, C)
    if value < -CLAMP_TOL:
        raise InternalConsistencyError(f"{a} evaluated to {value!r}")
    if value <= CLAMP_TOL:
        value = 0.0
    return value


class Scheme(str, Enum):
    SCHEME1 = "Scheme1"
    SCHEME2A = "Scheme2A"
    SCHEME2B = "Scheme2B"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for s in cls:
            if s.value.lower() == str(value).lower():
                return s
        raise DomainError(f"unknown scheme {value!r}; expected one of "
                          f"{[s.value for s in cls]}")


SCHEME_VARIABLES = {
    Scheme.SCHEME1: ("U0", "U1", "U2", "X1", "X", "Y1", "Y2", "Yh1"),
    Scheme.SCHEME2A: ("U0", "U1", "U2", "X1", "X2", "X", "Y1", "Y2", "Yh1", "Yh2"),
    Scheme.SCHEME2B: ("U0", "U1", "U2", "X1", "X2", "X", "Y1", "Y2", "Yh1", "Yh2"),
}


@dataclass(frozen=True)
class StructuredFamilySpec:
    """Which factorization to sample, alphabet sizes, and the RNG seed.

    ``sizes`` maps variable names to alphabet sizes; unspecified variables
    get ``default_size``.  With ``independent_auxiliaries`` the satellite
    codewords are drawn conditionally independent given the cloud center and
    relay inputs, P(U1|U0,X..) P(U2|U0,X..), which keeps the Marton penalty
    I(U1;U2|U0,X..) at zero and makes nonempty regions common.
    """

    scheme: Scheme
    sizes: dict = field(default_factory=dict)
    seed: int = 0
    default_size: int = 2
    independent_auxiliaries: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        variables = SCHEME_VARIABLES[self.scheme]
        unknown = set(self.sizes) - set(variables)
        if unknown:
            raise DomainError(f"unknown variables {sorted(unknown)} for {self.scheme.value}")
        for name in variables:
            if int(self.size(name)) < 1:
                raise DomainError(f"alphabet size of {name} must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def size(self, name):
        return int(self.sizes.get(name, self.default_size))


def _dirichlet(rng, cond_shape, k):
    # uniform on the simplex, one draw per conditioning cell
    return rng.dirichlet(np.ones(k), size=cond_shape) if k > 1 else np.ones(cond_shape + (1,))


def random_structured_pmf(spec):
    """Seeded random joint pmf with the scheme's factorization.

    Scheme1:   P(U0,U1,U2,X1) P(Y1,Y2|X,X1) P(Yh1|U0,X1,Y1)
    Scheme2A:  P(X1) P(X2) P(U0,U1,U2|X1,X2) P(Y1,Y2|X,X1,X2)
               P(Yh1|X1,Y1) P(Yh2|X2,Y2)
    Scheme2B:  as Scheme2A but with P(Yh1|U0,X1,X2,Y1)

    In every case X = f(U0,U1,U2) for a uniformly drawn lookup table f.
    """
    rng = np.random.default_rng(int(spec.seed))
    s = spec.size
    u0, u1, u2, x, x1 = s("U0"), s("U1"), s("U2"), s("X"), s("X1")
    y1, y2, yh1 = s("Y1"), s("Y2"), s("Yh1")
    f = rng.integers(0, x, size=(u0, u1, u2))
    F = np.zeros((u0, u1, u2, x))
    np.put_along_axis(F, f[..., None], 1.0, axis=-1)

    if spec.scheme is Scheme.SCHEME1:
        if spec.independent_auxiliaries:
            p0 = rng.dirichlet(np.ones(u0 * x1)).reshape(u0, x1)
            a1 = _dirichlet(rng, (u0, x1), u1)
            a2 = _dirichlet(rng, (u0, x1), u2)
            pu = np.einsum("ad,adb,adc->abcd", p0, a1, a2)
        else:
            pu = rng.dirichlet(np.ones(u0 * u1 * u2 * x1)).reshape(u0, u1, u2, x1)
        ch = _dirichlet(rng, (x, x1), y1 * y2).reshape(x, x1, y1, y2)
        q1 = _dirichlet(rng, (u0, x1, y1), yh1)
        # axes: a=U0 b=U1 c=U2 d=X1 e=X g=Y1 h=Y2 k=Yh1
        probs = np.einsum("abcd,abce,edgh,adgk->abcdeghk", pu, F, ch, q1)
        return JointPmf(SCHEME_VARIABLES[spec.scheme], probs / probs.sum())

    x2, yh2 = s("X2"), s("Yh2")
    px1 = _dirichlet(rng, (), x1)
    px2 = _dirichlet(rng, (), x2)
    if spec.independent_auxiliaries:
        a0 = _dirichlet(rng, (x1, x2), u0)
        a1 = _dirichlet(rng, (x1, x2, u0), u1)
        a2 = _dirichlet(rng, (x1, x2, u0), u2)
        pu = np.einsum("dea,deab,deac->deabc", a0, a1, a2)
    else:
        pu = _dirichlet(rng, (x1, x2), u0 * u1 * u2).reshape(x1, x2, u0, u1, u2)
    ch = _dirichlet(rng, (x, x1, x2), y1 * y2).reshape(x, x1, x2, y1, y2)
    q2 = _dirichlet(rng, (x2, y2), yh2)
    # axes: a=U0 b=U1 c=U2 d=X1 e=X2 g=X h=Y1 i=Y2 k=Yh1 l=Yh2
    if spec.scheme is Scheme.SCHEME2A:
        q1 = _dirichlet(rng, (x1, y1), yh1)
        probs = np.einsum("d,e,deabc,abcg,gdehi,dhk,eil->abcdeghikl",
                          px1, px2, pu, F, ch, q1, q2)
    else:
        q1 = _dirichlet(rng, (u0, x1, x2, y1), yh1)
        probs = np.einsum("d,e,deabc,abcg,gdehi,adehk,eil->abcdeghikl",
                          px1, px2, pu, F, ch, q1, q2)
    return JointPmf(SCHEME_VARIABLES[spec.scheme], probs / probs.sum())
