import pytest
from hypothesis import given, settings

from fermat_curves import curve
from fermat_curves.curve import (
    AllZero,
    CurveMap,
    CurveParseError,
    DegreeMismatch,
    NotOnFermat,
    NotPrimitive,
    check_identity_521,
    coefficient_matrix,
    identity_521_sums,
    matrix_rank,
    multiplication_matrix,
    pure_identity_columns,
)
from fermat_curves.field import FieldElement
from fermat_curves.forms import BinaryForm, parse_form
from fermat_curves.linalg import dense_rank

from strategies import paired_curves, searched_curves

S = BinaryForm.monomial(1, 0)
T = BinaryForm.monomial(0, 1)
Z1 = BinaryForm.zero(1)


def test_fixtures_validate(degree8, degree9):
    assert degree8.degree == 8 and degree9.degree == 9
    assert degree8.fifth_power_sum().is_zero()
    assert degree9.fifth_power_sum().is_zero()


def test_wrong_count():
    with pytest.raises(curve.CurveError):
        curve.validate([S, S, T, T])


def test_not_on_fermat_reports_residual():
    with pytest.raises(NotOnFermat) as info:
        curve.validate([S, T, Z1, Z1, Z1, Z1])
    assert info.value.residual == parse_form("S^5 + T^5")


def test_not_primitive():
    S2 = S * S
    ST = S * T
    with pytest.raises(NotPrimitive) as info:
        curve.validate([S2, S2, ST, ST, BinaryForm.zero(2), BinaryForm.zero(2)])
    assert info.value.witness.degree == 1


def test_all_zero():
    with pytest.raises(AllZero):
        curve.validate([Z1] * 6)


def test_mixed_degrees():
    with pytest.raises(DegreeMismatch):
        CurveMap(1, (S, S, T, T, Z1, BinaryForm.zero(2)))


def test_mixed_fields():
    with pytest.raises(DegreeMismatch):
        CurveMap(1, (S, S, T, T, Z1, BinaryForm.zero(1, 2)))


def test_tampered_fixture_fails(degree8):
    text = curve.dumps(degree8).replace("G0 = S^7*T", "G0 = S^7*T + T^8")
    with pytest.raises(NotOnFermat):
        curve.loads(text)


@pytest.mark.parametrize(
    "text,line",
    [
        ("degree: 1\n", 1),
        ("field: 2^1\nfield: 2^1\n", 2),
        ("field: 2^1\ndegree: 1\nG0 = S\nG0 = S\n", 4),
        ("field: 2^1\ndegree: 1\nG0 = S +\n", 3),
        ("field: 2^1\ndegree: 1\nG7 = S\n", 3),
        ("field: 2^99\n", 1),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(CurveParseError) as info:
        curve.loads(text)
    assert info.value.line == line


def test_missing_forms():
    with pytest.raises(CurveParseError):
        curve.loads("field: 2^1\ndegree: 1\nG0 = S\n")


def test_comments_and_blank_lines(line):
    text = "# a line\n\nfield: 2^1  # binary\ndegree: 1\n" + "\n".join(curve.dumps(line).splitlines()[2:])
    assert curve.loads(text) == line


@given(paired_curves())
@settings(max_examples=60, deadline=None)
def test_roundtrip(c):
    assert curve.loads(curve.dumps(c)) == c
    assert curve.loads(curve.dumps(c, compact=True)) == c


def test_file_roundtrip(tmp_path, degree9):
    p = tmp_path / "c.curve"
    curve.dump(degree9, p)
    assert curve.load(p) == degree9


def test_coefficient_matrix(degree8):
    M = coefficient_matrix(degree8)
    assert M.shape == (6, 9)
    # G0 = S^7 T
    assert M.rows[0] == (0, 1, 0, 0, 0, 0, 0, 0, 0)
    assert M.column(1) == (1, 0, 0, 1, 1, 1)
    assert M.entry(4, 0) == FieldElement(1)
    assert M.frobenius() == M  # a^4 = a over GF(2)
    # the six forms are independent
    assert matrix_rank(M) == 6


def test_matrix_rank_against_dense(degree9):
    M = coefficient_matrix(degree9)
    assert matrix_rank(M) == dense_rank([list(r) for r in M.rows])


def test_multiplication_matrix_shape(degree8):
    rows = multiplication_matrix(degree8, 1)
    assert len(rows) == 10 and all(len(r) == 12 for r in rows)
    assert dense_rank(rows) == 10
    # plain degree 0 is the transposed coefficient matrix
    rows0 = multiplication_matrix(degree8, 0)
    assert [list(c) for c in zip(*rows0)] == [list(r) for r in coefficient_matrix(degree8).rows]


def test_pure_identity_columns():
    assert pure_identity_columns(4) == [1, 2, 3]
    assert pure_identity_columns(5) == [2, 3]
    assert pure_identity_columns(1) == [0, 1]
    with pytest.raises(ValueError):
        identity_521_sums(curve.validate([S, S, T, T, Z1, Z1]), 7)


@pytest.mark.parametrize("d", [4, 5])
def test_identity_on_searched_curves(d):
    cols = (1, 3) if d == 4 else (2,)
    for c in searched_curves(d, 200):
        for v in cols:
            assert check_identity_521(c, v)


@given(paired_curves(max_degree=6))
@settings(max_examples=60, deadline=None)
def test_identity_holds_on_every_curve(c):
    # the generic field path and the GF(2) path agree with the definition
    for v in pure_identity_columns(c.degree):
        assert check_identity_521(c, v)
