import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_cmi, slice_r0
from rbcfb.polytope import enumerate_vertices, polytopes_equal
from rbcfb.prob import (
    DomainError, Scheme, StructuredFamilySpec, atom, cond_mutual_information,
    random_structured_pmf,
)
from rbcfb.regions import (
    MIAssignment, RegionId, build_region, evaluate_rows, expr,
    instantiate_region, relaxed_feedback_constraint, assignment_from_pmf, swap_indices,
)


def pmf(scheme, seed, **sizes):
    return random_structured_pmf(StructuredFamilySpec(scheme, sizes=sizes, seed=seed))


def instantiate(region, p, rfb1=math.inf, rfb2=math.inf):
    spec = build_region(region) if isinstance(region, (str, RegionId)) else region
    return instantiate_region(spec, assignment_from_pmf(p, spec.atoms()), rfb1, rfb2)


# templates

@pytest.mark.parametrize("rid, nrows, nfeas", [
    ("Theorem1", 5, 1), ("Theorem2", 5, 2), ("Theorem3v1", 6, 2), ("Theorem3v2", 6, 2),
    ("Liang", 5, 0), ("Wu", 5, 2)])
def test_row_counts(rid, nrows, nfeas):
    spec = build_region(rid)
    assert len(spec.rows) == nrows and len(spec.feasibility) == nfeas


def test_liang_has_no_compression_atoms():
    spec = build_region(RegionId.LIANG)
    assert len(spec.rows) == 5
    assert all("Yh1" not in a.variables and "Yh2" not in a.variables for a in spec.atoms())


def test_theorem2_common_row_has_min_term():
    coeffs, e, _ = build_region(RegionId.THEOREM2).rows[0]
    assert coeffs == (1, 1, 0)
    assert len(e.mins) == 1
    assert atom("I(Yh2;Y2|X1,X2,Y1)") in e.mins[0].atoms()


def test_theorem3v2_is_index_swap():
    v1, v2 = build_region("Theorem3v1"), build_region("Theorem3v2")
    assert v2.id is RegionId.THEOREM3V2
    swapped = swap_indices(v1, RegionId.THEOREM3V2)
    assert v2 == swapped
    assert swap_indices(swapped, RegionId.THEOREM3V1) == v1


def test_region_json_is_structured():
    doc = json.loads(json.dumps(build_region("Theorem2").to_json()))
    assert doc["id"] == "Theorem2"
    term = doc["rows"][0]["rhs"]["terms"][0]
    assert set(term["atom"]) == {"left", "right", "cond"}
    assert doc["feasibility"][1]["slot"] == "Rfb2"


def test_unknown_region():
    with pytest.raises(DomainError):
        build_region("Theorem9")


def test_expression_parser():
    e = expr("I(U0;Y1|X1) - I(U1;U2|U0) + min0(Rfb2 - I(Yh2;Y2|Y1))")
    vals = {atom("I(U0;Y1|X1)"): 1.0, atom("I(U1;U2|U0)"): 0.25, atom("I(Yh2;Y2|Y1)"): 0.5}
    assert e.evaluate(vals, (math.inf, 0.1)) == pytest.approx(1.0 - 0.25 - 0.4)
    assert e.evaluate(vals, (math.inf, math.inf)) == pytest.approx(0.75)
    assert expr(str(e)) == e
    for bad in ("I(A;B) +", "min0(I(A;B)", "- min0(I(A;B))", "J(A;B)"):
        with pytest.raises(DomainError):
            expr(bad)


# instantiation

@pytest.mark.parametrize("rid", ["Theorem1", "Theorem2", "Theorem3v1", "Liang", "Wu"])
def test_zero_atoms_give_origin(rid):
    spec = build_region(rid)
    sys, ok = instantiate_region(spec, MIAssignment({a: 0.0 for a in spec.atoms()}))
    assert ok
    np.testing.assert_allclose(enumerate_vertices(sys).points, [[0.0, 0.0, 0.0]])


def test_missing_atom_is_named():
    spec = build_region("Theorem1")
    vals = {a: 0.1 for a in spec.atoms() if a != atom("I(Yh1;Y1|U0,X1)")}
    with pytest.raises(DomainError, match=r"I\(Y1;Yh1\|U0,X1\)"):
        instantiate_region(spec, MIAssignment(vals))


def test_assignment_rejects_negative():
    with pytest.raises(DomainError):
        MIAssignment({"I(A;B)": -0.1})
    assert MIAssignment({"I(A;B)": -1e-13})["I(A;B)"] == 0.0


def _liang_rows_by_hand(p):
    """Liang region rows recomputed from explicit outcome sums."""
    def I(l, r, c=()):
        return brute_cmi(p.probs, p.names, l, r, c)
    mart = I(["U1"], ["U2"], ["U0", "X1"])
    a = I(["U0", "U1"], ["Y1"], ["X1"])
    b = I(["U0", "U2", "X1"], ["Y2"])
    return [(np.array([1, 1, 0]), a), (np.array([1, 0, 1]), b),
            (np.array([1, 1, 1]), I(["U1"], ["Y1"], ["U0", "X1"]) + b - mart),
            (np.array([1, 1, 1]), a + I(["U2"], ["Y2"], ["U0", "X1"]) - mart),
            (np.array([2, 1, 1]), a + b - mart)]


@pytest.mark.parametrize("seed", [0, 4, 9])
def test_liang_vertices_satisfy_recomputed_rows(seed):
    p = pmf(Scheme.SCHEME1, seed)
    sys, _ = instantiate("Liang", p)
    verts = enumerate_vertices(sys).points
    for c, rhs in _liang_rows_by_hand(p):
        assert np.all(verts @ c <= rhs + 1e-9)
    assert np.all(verts >= -1e-9)


def test_liang_rows_match_hand_values():
    p = pmf(Scheme.SCHEME1, 3)
    spec = build_region("Liang")
    got = evaluate_rows(spec, assignment_from_pmf(p, spec.atoms()))
    want = [rhs for _, rhs in _liang_rows_by_hand(p)]
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_theorem2_delta_with_constant_relays():
    p = pmf(Scheme.SCHEME2A, 5, X1=1, X2=1)
    spec = build_region("Theorem2")
    a = assignment_from_pmf(p, spec.atoms())
    d1 = spec.rows[0][1].mins[0].evaluate(a.values)
    assert min(0.0, d1) == pytest.approx(
        -brute_cmi(p.probs, p.names, ["Yh2"], ["Y2"], ["Y1"]), abs=1e-12)


def test_feedback_verdict():
    p = pmf(Scheme.SCHEME1, 2)
    need = cond_mutual_information(p, "I(Yh1;Y1|U0,X1)")
    assert need > 0
    assert instantiate("Theorem1", p, rfb1=need + 1e-9)[1]
    assert not instantiate("Theorem1", p, rfb1=need / 2)[1]
    # the polytope is still returned when the verdict is false
    assert instantiate("Theorem1", p, rfb1=0.0)[0].nrows == 8
    with pytest.raises(DomainError):
        instantiate("Theorem1", p, rfb1=-1.0)


def test_wu_pins_common_rate():
    sys, _ = instantiate("Wu", pmf(Scheme.SCHEME2A, 1, X1=1, X2=1))
    assert np.all(enumerate_vertices(sys).points[:, 0] == 0.0)


# relaxed feedback constraint

def test_relaxed_constraint_conditions_on_y2():
    r = relaxed_feedback_constraint(build_region("Theorem1"))
    assert r.relaxed
    assert r.feasibility[0][0].atoms() == {atom("I(Yh1;Y1|U0,X1,Y2)")}
    assert relaxed_feedback_constraint(r) == r
    with pytest.raises(DomainError):
        relaxed_feedback_constraint(build_region("Theorem2"))


@given(st.integers(0, 2**32 - 1))
def test_relaxed_value_not_larger(seed):
    p = pmf(Scheme.SCHEME1, seed)
    assert (cond_mutual_information(p, "I(Yh1;Y1|U0,X1,Y2)")
            <= cond_mutual_information(p, "I(Yh1;Y1|U0,X1)") + 1e-12)


# reductions and invariants

@given(st.integers(0, 2**32 - 1))
def test_theorem1_reduces_to_liang(seed):
    p = pmf(Scheme.SCHEME1, seed, Yh1=1)
    t1, ok = instantiate("Theorem1", p, rfb1=0.0)
    assert ok
    assert polytopes_equal(t1, instantiate("Liang", p)[0], tol=1e-10).equal


@given(st.integers(0, 2**32 - 1))
def test_theorem2_reduces_to_wu(seed):
    p = pmf(Scheme.SCHEME2A, seed, X1=1, X2=1)
    t2, _ = instantiate("Theorem2", p)
    assert polytopes_equal(slice_r0(t2), instantiate("Wu", p)[0], tol=1e-10).equal


@given(st.integers(0, 2**32 - 1), st.floats(0, 2), st.floats(0, 2))
def test_delta_signs(seed, rfb1, rfb2):
    p = pmf(Scheme.SCHEME2B, seed)
    for rid in ("Theorem2", "Theorem3v1"):
        spec = build_region(rid)
        a = assignment_from_pmf(p, spec.atoms())
        for _, e, _ in spec.rows:
            for m in e.mins:
                assert min(0.0, m.evaluate(a.values, (rfb1, rfb2))) <= 0.0
    spec = build_region("Theorem3v1")
    a = assignment_from_pmf(p, spec.atoms())
    i1 = expr("I(U1;Yh2,Y1|U0,X1,X2) + min0(Rfb2 - I(Yh2;Y2|U0,X1,X2,Y1))")
    assert i1.evaluate(a.values, (rfb1, rfb2)) <= a["I(U1;Yh2,Y1|U0,X1,X2)"] + 1e-12


@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1),
       st.floats(0, 1), st.floats(0, 1))
def test_feedback_verdict_monotone(seed, r1, r2, e1, e2):
    p = pmf(Scheme.SCHEME2A, seed)
    for rid in ("Theorem2", "Theorem3v1", "Wu"):
        if instantiate(rid, p, r1, r2)[1]:
            assert instantiate(rid, p, r1 + e1, r2 + e2)[1]
