import itertools

import pytest
from hypothesis import given, settings

from fermat_curves import classify as C
from fermat_curves.classify import (
    ClassificationError,
    ClassificationReport,
    ContradictsPaper,
    TraceInconsistent,
    WrongDegree,
    admissible_types,
    audit,
    classify,
    frobenius_contradiction_steps,
    refute_low_degree,
)
from fermat_curves.graded import EXTENDED, OMEGA, TANGENT, SplittingType

from strategies import paired_curves, searched_curves


def fake_report(d, e_type, tangent, free=None, very_free=None):
    f = tuple(sorted(4 * x + 5 * d for x in e_type))
    return ClassificationReport(
        d,
        SplittingType(e_type, OMEGA),
        SplittingType(f, EXTENDED),
        SplittingType(tangent, TANGENT),
        free=min(f) >= 0 if free is None else free,
        very_free=min(tangent) >= 1 if very_free is None else very_free,
        e_case_4b_flag=f.count(0) == 1 and min(f) >= 0,
    )


def test_degree8(degree8):
    r = classify(degree8)
    assert r.free and not r.very_free and not r.e_case_4b_flag
    assert r.extended.entries == (0, 0, 0, 4, 4)
    audit(r)


def test_degree9(degree9):
    r = classify(degree9)
    assert r.free and r.very_free
    assert r.omega.entries == (-11, -11, -11, -11, -10)
    audit(r)


def test_line_not_free(line):
    r = classify(line)
    assert not r.free and not r.very_free
    audit(r)


def test_methods_agree(degree8, degree9):
    for c in (degree8, degree9):
        assert classify(c, "lift") == classify(c, "direct")


def test_report_roundtrip(degree8):
    r = classify(degree8)
    assert ClassificationReport.from_dict(r.to_dict()) == r
    assert '"free": true' in r.to_json()
    assert "free:       yes" in r.to_text()


def test_check_catches_inconsistency(degree8):
    r = classify(degree8)
    bad = ClassificationReport(r.degree, r.omega, r.extended, r.tangent, False, r.very_free, r.e_case_4b_flag)
    with pytest.raises(ClassificationError):
        bad.check()


@pytest.mark.parametrize(
    "d,e_type,tangent",
    [
        (4, (-5, -5, -5, -5, -4), (0, 0, 0, 4)),  # free in degree 4
        (5, (-6,) * 5, (1, 1, 1, 2)),  # very free in degree 5
        (8, (-10, -10, -10, -10, -8), (1, 1, 1, 5)),  # very free in degree 8
        (9, (-11,) * 4 + (-10,), (0, 1, 3, 5)),  # free but not very free, 9 not divisible by 4
    ],
)
def test_audit_contradictions(d, e_type, tangent):
    with pytest.raises(ContradictsPaper) as info:
        audit(fake_report(d, e_type, tangent))
    assert info.value.report.degree == d


def test_audit_case_4b():
    # one zero extended twist yet very free; first possible in degree 16
    r = fake_report(16, (-20, -19, -19, -19, -19), (1, 1, 1, 13))
    assert r.e_case_4b_flag
    with pytest.raises(ContradictsPaper):
        audit(r)


def test_numerology_lists():
    for d in (1, 2, 3, 6, 7):
        assert admissible_types(d).admissible_free_e_types == ()
    assert admissible_types(4).admissible_free_e_types == ((-5, -5, -5, -5, -4),)
    assert admissible_types(5).admissible_very_free_e_types == ((-6,) * 5,)
    for d in (4, 8):
        assert admissible_types(d).admissible_very_free_e_types == ()
    assert all(admissible_types(d).open_case_e_types == () for d in range(1, 16))
    assert admissible_types(16).open_case_e_types == ((-20, -19, -19, -19, -19),)
    assert admissible_types(9).admissible_very_free_e_types == ((-11, -11, -11, -11, -10),)


@pytest.mark.parametrize("d", range(1, 14))
def test_numerology_against_brute_force(d):
    # every nondecreasing 5-tuple with f_i >= 0, f_i = 4 e_i + 5 d, sum f_i = d
    want = []
    for f in itertools.combinations_with_replacement(range(d + 1), 5):
        if sum(f) == d and all((x - 5 * d) % 4 == 0 for x in f):
            want.append(tuple((x - 5 * d) // 4 for x in f))
    v = admissible_types(d)
    assert sorted(v.admissible_free_e_types) == sorted(want)
    assert sorted(v.admissible_very_free_e_types) == sorted(t for t in want if min(4 * x + 5 * d for x in t) > 0)
    assert v.to_dict()["free_possible"] == bool(want)


def test_refute_wrong_degree(degree8):
    with pytest.raises(WrongDegree):
        refute_low_degree(degree8)


@pytest.mark.parametrize("d", [4, 5])
def test_refute_traces(d):
    for c in searched_curves(d, 60):
        trace = refute_low_degree(c)
        assert trace.valid
        assert trace.case == "rank-deficient" and trace.rank < d + 1
        assert trace.to_dict()["valid"]


def test_frobenius_branch_on_fabricated_matrix():
    # an invertible 6x6 matrix: not a curve, so column 2 cannot be in the left kernel
    rows = [tuple(1 if j == i else 0 for j in range(6)) for i in range(6)]
    steps = frobenius_contradiction_steps(rows, 5)
    assert not all(s.ok for s in steps)
    assert steps[0].ok  # rank of the fourth-power matrix is 6


def test_trace_inconsistent_carries_trace(monkeypatch):
    c = searched_curves(4, 1)[0]
    monkeypatch.setattr(C, "matrix_rank", lambda M: 5)
    with pytest.raises(TraceInconsistent) as info:
        refute_low_degree(c)
    assert info.value.trace is not None and info.value.trace.case == "maximal-rank"


@given(paired_curves(max_degree=5))
@settings(max_examples=40, deadline=None)
def test_report_invariants(c):
    r = classify(c)
    d = c.degree
    assert sum(r.omega.entries) == -6 * d
    assert sum(r.extended.entries) == d
    assert r.extended.entries == tuple(sorted(4 * x + 5 * d for x in r.omega.entries))
    if d < 8:
        assert not r.free
    audit(r)
