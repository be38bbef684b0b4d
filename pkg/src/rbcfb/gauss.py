"""Jointly Gaussian systems and their conditional mutual information.

A ``GaussianSystem`` is a list of variable names plus a covariance matrix.
The covariance may carry leading batch axes, shape ``(..., n, n)``: every
operation then acts elementwise over the batch.  The optimizers in
``rbcfb.bounds`` rely on this to evaluate whole parameter grids at once.

Conditional mutual information is computed from sequential conditional
variances (Cholesky pivots).  For I(A;B|C) with B = (b_1..b_k)::

    I = 1/2 sum_j log2( Var(b_j | C, b_<j) / Var(b_j | C, A, b_<j) )

A pivot below 1e-12 (relative to the variable's variance, with a 1e-12
floor) means the variable is a deterministic function of what precedes it;
such a dimension is dropped, which is the pseudo-determinant convention.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .prob import DomainError, MIAtom, atom as parse_atom

__all__ = [
    "GaussianSystem",
    "NumericalError",
    "extend_linear",
    "gaussian_cond_mi",
    "independent",
]

PSD_TOL = 1e-9
SYM_TOL = 1e-10
PIVOT_TOL = 1e-12


class NumericalError(ArithmeticError):
    """Conditional covariance too ill-conditioned to give a finite answer."""


@dataclass(frozen=True)
class GaussianSystem:
    names: tuple
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = tuple(self.names)
        cov = np.array(self.cov, dtype=np.float64)
        n = len(names)
        if len(set(names)) != n:
            raise DomainError(f"duplicate variable names in {names}")
        if cov.shape[-2:] != (n, n):
            raise DomainError(f"covariance shape {cov.shape} does not match {n} variables")
        scale = max(1.0, float(np.abs(cov).max(initial=0.0)))
        if np.abs(cov - np.swapaxes(cov, -1, -2)).max(initial=0.0) > SYM_TOL * scale:
            raise DomainError("covariance is not symmetric")
        if n and np.linalg.eigvalsh(cov).min() < -PSD_TOL * scale:
            raise DomainError("covariance is not positive semidefinite")
        cov.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def _trusted(cls, names, cov):
        # construction paths that preserve symmetry/PSD by design skip the checks
        obj = object.__new__(cls)
        cov = np.asarray(cov, dtype=np.float64)
        cov.setflags(write=False)
        object.__setattr__(obj, "names", tuple(names))
        object.__setattr__(obj, "cov", cov)
        return obj

    @property
    def batch_shape(self):
        return self.cov.shape[:-2]

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"unknown variable {name!r}; have {self.names}") from None

    def variance(self, name):
        i = self.index(name)
        return self.cov[..., i, i]


def independent(variances):
    """System of mutually independent zero-mean variables.

    ``variances`` maps names to variances (scalars or arrays of a common
    batch shape).
    """
    names = tuple(variances)
    vals = np.broadcast_arrays(*[np.asarray(v, dtype=np.float64) for v in variances.values()])
    if any(np.any(v < 0) for v in vals):
        raise DomainError("variances must be nonnegative")
    cov = np.zeros(vals[0].shape + (len(names), len(names)))
    for i, v in enumerate(vals):
        cov[..., i, i] = v
    if len(set(names)) != len(names):
        raise DomainError(f"duplicate variable names in {names}")
    return GaussianSystem._trusted(names, cov)


def extend_linear(sys, new, coeffs, noise_var=0.0):
    """Append ``new = sum_k coeffs[k] * k + Z`` with Z ~ N(0, noise_var).

    Z is independent of every existing variable.  Coefficients and the noise
    variance may be arrays broadcasting against the system's batch shape.
    """
    if new in sys.names:
        raise DomainError(f"variable {new!r} already present")
    noise_var = np.asarray(noise_var, dtype=np.float64)
    if np.any(noise_var < 0):
        raise DomainError("noise variance must be nonnegative")
    n = len(sys.names)
    shapes = [sys.batch_shape, noise_var.shape] + [np.shape(c) for c in coeffs.values()]
    batch = np.broadcast_shapes(*shapes)
    w = np.zeros(batch + (n,))
    for name, c in coeffs.items():
        w[..., sys.index(name)] = c
    old = np.broadcast_to(sys.cov, batch + (n, n))
    cross = np.einsum("...ij,...j->...i", old, w)
    var = np.einsum("...i,...i->...", cross, w) + noise_var
    cov = np.zeros(batch + (n + 1, n + 1))
    cov[..., :n, :n] = old
    cov[..., :n, n] = cross
    cov[..., n, :n] = cross
    cov[..., n, n] = var
    return GaussianSystem._trusted(sys.names + (new,), cov)


def _ordered_pivots(sys, order):
    cov = sys.cov.reshape((-1,) + sys.cov.shape[-2:])
    piv = kernels.chol_pivots(np.ascontiguousarray(cov), np.asarray(order, dtype=np.intp),
                              PIVOT_TOL)
    return piv.reshape(sys.batch_shape + (len(order),))


def gaussian_cond_mi(sys, a):
    """I(left; right | cond) in bits for a Gaussian system.

    Returns a float for an unbatched system and an array otherwise.
    Raises NumericalError when a right-hand variable is (numerically)
    determined by the left side while still random given ``cond``, since the
    information would be infinite.
    """
    if isinstance(a, str):
        a = parse_atom(a)
    if not isinstance(a, MIAtom):
        raise DomainError(f"expected an MIAtom, got {a!r}")
    C = [sys.index(v) for v in sorted(a.cond)]
    A = [sys.index(v) for v in sorted(a.left)]
    B = [sys.index(v) for v in sorted(a.right)]
    k = len(B)
    given_c = _ordered_pivots(sys, C + B)[..., len(C):]
    given_ac = _ordered_pivots(sys, C + A + B)[..., len(C) + len(A):]
    live = given_c > 0.0
    if np.any(live & (given_ac <= 0.0)):
        raise NumericalError(f"{a}: conditional covariance is singular "
                             f"(condition number above {1 / PIVOT_TOL:.0e})")
    safe_c = np.where(live, given_c, 1.0)
    safe_ac = np.where(live, given_ac, 1.0)
    terms = 0.5 * np.log2(safe_c / safe_ac)
    value = terms.sum(axis=-1) if k else np.zeros(sys.batch_shape)
    value = np.maximum(value, 0.0)
    if value.ndim == 0:
        return float(value)
    return value
