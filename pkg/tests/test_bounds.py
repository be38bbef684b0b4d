import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rbcfb.bounds import (
    GaussianRbcParams, cf_rate, liang_pdf_rate, rbc_system, scheme1_rate, table1, table1_csv,
    table1_json, wu_rate,
)
from rbcfb.gauss import gaussian_cond_mi
from rbcfb.prob import DomainError

DS = (0.73, 0.74, 0.75, 0.76)
# published values: (liang, scheme1, wu, cf)
PUBLISHED = {
    0.73: (1.6881, 1.7069, 1.2925, 1.6908),
    0.74: (1.6703, 1.7111, 1.2925, 1.6971),
    0.75: (1.6529, 1.7153, 1.2925, 1.7033),
    0.76: (1.6358, 1.7195, 1.2925, 1.7094),
}
COLUMNS = ("liang", "scheme1", "wu", "cf")


@pytest.fixture(scope="module")
def table():
    return table1(DS, GaussianRbcParams(d=0.5, P=5, P1=1))


def cap(p):
    # total received power at a cooperating pair of receivers
    snr = (p.g01**2 + p.g02**2) * p.P + p.g12**2 * p.P1 + 2 * p.g02 * p.g12 * math.sqrt(p.P * p.P1)
    return 0.5 * math.log2(1 + snr)


# wu

def test_wu_values():
    assert wu_rate(GaussianRbcParams(d=0.73)).rate == pytest.approx(1.2925, abs=5e-4)
    assert wu_rate(GaussianRbcParams(d=0.73, P=0)).rate == 0.0
    assert wu_rate(GaussianRbcParams(d=0.73, P=3)).rate == pytest.approx(1.0, abs=1e-12)


# published table

@pytest.mark.parametrize("d", DS)
def test_table_within_tolerance(table, d):
    row = next(r for r in table if r["d"] == d)
    for col, want in zip(COLUMNS, PUBLISHED[d]):
        assert want - 0.01 <= row[col].rate <= want + 0.02, (col, row[col].rate, want)


def test_table_ordering(table):
    for r in table:
        assert r["scheme1"].rate > r["cf"].rate > r["liang"].rate > r["wu"].rate


def test_table_csv(table):
    text = table1_csv(table)
    lines = text.splitlines()
    assert lines[0] == "d,liang,scheme1,wu,cf"
    assert lines[1].startswith("0.73,")
    assert all(len(f.split(".")[1]) == 4 for f in lines[1].split(",")[1:])


def test_table_json(table):
    doc = table1_json(table, GaussianRbcParams(d=0.5))
    assert doc["columns"] == ["d", "liang", "scheme1", "wu", "cf"]
    assert doc["rows"][0]["liang"]["argmax"]["nhat"] == "inf"
    assert set(doc["rows"][0]["scheme1"]["argmax"]) == {"beta", "gamma", "nhat"}


def test_table_deterministic():
    a = table1_csv(table1([0.74]))
    b = table1_csv(table1([0.74]))
    assert a == b


def test_table_zero_power():
    (row,) = table1([0.75], GaussianRbcParams(d=0.5, P=0.0))
    for col in COLUMNS:
        assert row[col].rate == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        table1([])


# identities

@pytest.mark.parametrize("d", DS)
def test_scheme1_without_feedback_is_liang(d):
    p = GaussianRbcParams(d=d, rfb1=0.0)
    assert scheme1_rate(p).rate == pytest.approx(liang_pdf_rate(p).rate, abs=1e-6)


@pytest.mark.parametrize("d", DS)
def test_cf_without_compression_is_wu(d):
    p = GaussianRbcParams(d=d)
    assert cf_rate(p, nhat=math.inf).rate == pytest.approx(wu_rate(p).rate, abs=1e-6)


@pytest.mark.parametrize("d", DS)
def test_scheme1_dominates(d):
    p = GaussianRbcParams(d=d)
    assert scheme1_rate(p).rate >= max(liang_pdf_rate(p).rate, cf_rate(p).rate) - 1e-6


def test_blind_relay_gives_direct_link():
    p = GaussianRbcParams(g01=0.0, g02=1.0, g12=1.0)
    assert liang_pdf_rate(p).rate == pytest.approx(wu_rate(p).rate, abs=1e-9)


def test_parameter_validation():
    for d in (0.0, 1.0):
        with pytest.raises(DomainError, match="d must differ from 0 and 1"):
            GaussianRbcParams(d=d)
    with pytest.raises(DomainError):
        GaussianRbcParams(d=0.5, P=-1)
    with pytest.raises(DomainError):
        GaussianRbcParams(g01=1.0)
    with pytest.raises(DomainError):
        cf_rate(GaussianRbcParams(d=0.5), nhat=-1.0)


def test_argmax_reproduces_rate():
    p = GaussianRbcParams(d=0.74)
    res = scheme1_rate(p)
    pt = res.argmax
    sys = rbc_system(p, pt.beta, pt.gamma, pt.nhat)
    r1 = gaussian_cond_mi(sys, "I(X,X1;Y2)") - gaussian_cond_mi(sys, "I(Yh1;Y1|U0,X,X1,Y2)")
    r2 = gaussian_cond_mi(sys, "I(U0;Y1|X1)") + gaussian_cond_mi(sys, "I(X;Yh1,Y2|U0,X1)")
    assert res.rate == pytest.approx(min(r1, r2), abs=1e-9)


def test_power_accounting():
    p = GaussianRbcParams(d=0.74)
    for beta, gamma in ((0.0, 0.0), (0.3, 0.6), (1.0, 0.5)):
        sys = rbc_system(p, beta, gamma, 1.0)
        assert sys.variance("X") == pytest.approx(p.P, abs=1e-12)
        assert sys.variance("X1") == pytest.approx(p.P1, abs=1e-12)


# invariants

@settings(max_examples=10)
@given(st.floats(0.05, 0.95).filter(lambda d: abs(d - 0.5) > 1e-3), st.floats(0.0, 2.0),
       st.floats(0.0, 2.0))
def test_monotone_in_feedback_rate(d, r, extra):
    p = GaussianRbcParams(d=d, rfb1=r)
    assert scheme1_rate(p.with_(rfb1=r + extra)).rate >= scheme1_rate(p).rate - 1e-12


@settings(max_examples=10)
@given(st.floats(0.05, 3.0).filter(lambda d: abs(d - 1) > 0.05), st.floats(0.0, 10.0),
       st.floats(0.0, 3.0))
def test_bounds_nonnegative_and_capped(d, P, P1):
    p = GaussianRbcParams(d=d, P=P, P1=P1)
    for f in (wu_rate, liang_pdf_rate, cf_rate, scheme1_rate):
        r = f(p).rate
        assert 0.0 <= r <= cap(p) + 1e-9


def test_relaxed_constraint_not_worse():
    p = GaussianRbcParams(d=0.75, rfb1=0.05)
    assert scheme1_rate(p, relaxed=True).rate >= scheme1_rate(p).rate - 1e-12


def test_batched_system_shapes():
    p = GaussianRbcParams(d=0.74)
    sys = rbc_system(p, np.linspace(0, 1, 3), 0.5, np.array([[1.0], [np.inf]]))
    assert sys.batch_shape == (2, 3)
    v = gaussian_cond_mi(sys, "I(Yh1;Y1|U0,X1)")
    assert np.all(v[1] == 0.0) and np.all(v[0] > 0.0)
