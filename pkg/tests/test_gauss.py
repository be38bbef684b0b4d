import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import cov_expand, monte_carlo_gaussian_cmi
from rbcfb.gauss import (
    GaussianSystem, NumericalError, extend_linear, gaussian_cond_mi, independent,
)
from rbcfb.prob import DomainError

NAMES4 = ("A", "B", "C", "D")


def random_system(seed, n=4):
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(n, n))
    return GaussianSystem(NAMES4[:n], W @ W.T + 0.1 * np.eye(n))


# extend_linear

def test_extend_linear_covariance():
    s = extend_linear(independent({"X": 5.0}), "Y", {"X": 1.0}, 1.0)
    np.testing.assert_allclose(s.cov, [[5.0, 5.0], [5.0, 6.0]])


def test_extend_constant_variable():
    s = extend_linear(independent({"X": 5.0}), "K", {"X": 0.0}, 0.0)
    np.testing.assert_array_equal(s.cov[1], [0.0, 0.0])
    np.testing.assert_array_equal(s.cov[:, 1], [0.0, 0.0])


def test_extend_matches_hand_expansion():
    d = 0.75
    s = extend_linear(independent({"X": 5.0, "Z1": 1.0}), "Y1", {"X": 1 / d, "Z1": 1.0})
    names, M = cov_expand({"X": {"X": 1.0}, "Z1": {"Z1": 1.0}, "Y1": {"X": 1 / d, "Z1": 1.0}},
                          {"X": 5.0, "Z1": 1.0})
    np.testing.assert_allclose(s.cov, M, rtol=1e-15)
    assert s.variance("Y1") == pytest.approx(5 / 0.5625 + 1, rel=1e-15)


def test_extend_errors():
    s = independent({"X": 1.0})
    with pytest.raises(DomainError):
        extend_linear(s, "Y", {"X": 1.0}, -1.0)
    with pytest.raises(DomainError):
        extend_linear(s, "X", {"X": 1.0})
    with pytest.raises(DomainError):
        extend_linear(s, "Y", {"Q": 1.0})


def test_system_validation():
    with pytest.raises(DomainError, match="symmetric"):
        GaussianSystem(("A", "B"), [[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(DomainError, match="semidefinite"):
        GaussianSystem(("A", "B"), [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(DomainError):
        GaussianSystem(("A",), np.eye(2))


# conditional MI

def test_awgn_link():
    s = extend_linear(independent({"X": 5.0}), "Y", {"X": 1.0}, 1.0)
    assert gaussian_cond_mi(s, "I(X;Y)") == pytest.approx(0.5 * math.log2(6), abs=1e-12)
    assert gaussian_cond_mi(s, "I(X;Y)") == pytest.approx(1.2925, abs=5e-5)


def test_zero_gain_link():
    s = extend_linear(independent({"X": 5.0}), "Y", {"X": 0.0}, 1.0)
    assert gaussian_cond_mi(s, "I(X;Y)") == 0.0


def test_degenerate_variable_is_dropped():
    s = extend_linear(independent({"X": 5.0, "Z": 1.0}), "K", {}, 0.0)
    s = extend_linear(s, "Y", {"X": 1.0, "Z": 1.0})
    assert gaussian_cond_mi(s, "I(K;Y)") == 0.0
    assert gaussian_cond_mi(s, "I(X;Y|K)") == pytest.approx(0.5 * math.log2(6), abs=1e-12)


def test_deterministic_copy_raises():
    s = extend_linear(independent({"X": 1.0}), "Y", {"X": 2.0})
    with pytest.raises(NumericalError):
        gaussian_cond_mi(s, "I(X;Y)")


def test_unknown_variable():
    with pytest.raises(DomainError):
        gaussian_cond_mi(random_system(0), "I(A;Q)")


def test_batched_matches_unbatched():
    covs = np.stack([random_system(s).cov for s in range(5)])
    batched = gaussian_cond_mi(GaussianSystem(NAMES4, covs), "I(A;B|C,D)")
    single = [gaussian_cond_mi(random_system(s), "I(A;B|C,D)") for s in range(5)]
    np.testing.assert_allclose(batched, single, rtol=0, atol=1e-13)


def _logdet_cmi(cov, A, B, C):
    def ld(idx):
        return np.linalg.slogdet(cov[np.ix_(idx, idx)])[1] if idx else 0.0
    return 0.5 * (ld(A + C) + ld(B + C) - ld(A + B + C) - ld(C)) / math.log(2)


@pytest.mark.parametrize("seed", range(4))
def test_monte_carlo_oracle(seed):
    s = random_system(seed)
    est = monte_carlo_gaussian_cmi(s.cov, [0], [1], [2, 3], draws=10**6, seed=1000 + seed)
    assert gaussian_cond_mi(s, "I(A;B|C,D)") == pytest.approx(est, abs=0.02)


@given(st.integers(0, 2**32 - 1))
def test_matches_log_determinants(seed):
    s = random_system(seed)
    assert gaussian_cond_mi(s, "I(A,C;B|D)") == pytest.approx(
        _logdet_cmi(s.cov, [0, 2], [1], [3]), abs=1e-9)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0), st.booleans())
def test_scaling_invariance(seed, c, negate):
    s = random_system(seed)
    c = -c if negate else c
    D = np.diag([c, 1.0, 1.0, 1.0])
    scaled = GaussianSystem(NAMES4, D @ s.cov @ D)
    for text in ("I(A;B|C,D)", "I(B;C|A)", "I(A,D;C)"):
        assert gaussian_cond_mi(scaled, text) == pytest.approx(gaussian_cond_mi(s, text), abs=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_chain_rule(seed):
    s = random_system(seed)
    lhs = gaussian_cond_mi(s, "I(A,B;C|D)")
    rhs = gaussian_cond_mi(s, "I(A;C|D)") + gaussian_cond_mi(s, "I(B;C|A,D)")
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(st.floats(0.01, 10.0), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_data_processing(px, a, b, n1, n2):
    s = extend_linear(independent({"X": px}), "Y", {"X": a}, n1)
    s = extend_linear(s, "W", {"Y": b}, n2)
    assert gaussian_cond_mi(s, "I(X;W)") <= gaussian_cond_mi(s, "I(X;Y)") + 1e-9
