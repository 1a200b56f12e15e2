import pytest
from hypothesis import given, strategies as st

from fermat_curves.field import FieldElement, field
from fermat_curves.forms import (
    BinaryForm,
    FormError,
    FormSyntaxError,
    divmod_forms,
    evaluate,
    format_form,
    gcd,
    gcd_many,
    is_primitive_bits,
    parse_form,
    pow4,
    pow5,
)

from oracles import convolve

S = BinaryForm.monomial(1, 0)
T = BinaryForm.monomial(0, 1)


def P(text, d=None, e=1):
    return parse_form(text, d, e)


@st.composite
def forms(draw, e=None, max_degree=6):
    e = e if e is not None else draw(st.sampled_from([1, 1, 2, 3, 8]))
    d = draw(st.integers(0, max_degree))
    coeffs = draw(st.lists(st.integers(0, (1 << e) - 1), min_size=d + 1, max_size=d + 1))
    return BinaryForm(d, tuple(coeffs), e)


@st.composite
def same_field_forms(draw, n=3, same_degree=False):
    e = draw(st.sampled_from([1, 1, 2, 4]))
    if same_degree:
        d = draw(st.integers(0, 5))
        return [
            BinaryForm(d, tuple(draw(st.lists(st.integers(0, (1 << e) - 1), min_size=d + 1, max_size=d + 1))), e)
            for _ in range(n)
        ]
    return [draw(forms(e=e)) for _ in range(n)]


def test_add_examples():
    assert (S + S) == BinaryForm.zero(1)
    assert P("S^7*T") + P("S^7*T + S^6*T^2") == P("S^6*T^2")
    F = P("S^3 + S*T^2")
    assert F + BinaryForm.zero(3) == F
    with pytest.raises(FormError):
        S + P("S^2")


def test_mul_examples():
    assert S * T == P("S*T")
    assert (S + T) * (S + T) == P("S^2 + T^2")
    assert (S + T) * (S + T) * (S + T) == P("S^3 + S^2*T + S*T^2 + T^3")


def test_pow_examples():
    assert pow5(P("S^7*T")) == P("S^35*T^5")
    assert pow5(BinaryForm.zero(3)) == BinaryForm.zero(15)
    assert pow5(S + T) == P("S^5 + S^4*T + S*T^4 + T^5")
    assert pow4(S + T) == P("S^4 + T^4")
    assert pow4(P("S^3*T")) == P("S^12*T^4")


def test_gcd_examples():
    assert gcd(P("S^2*T"), P("S*T^2")) == P("S*T")
    assert gcd(S, T) == BinaryForm.monomial(0, 0)
    assert gcd(P("S^2 + T^2"), S + T) == S + T
    with pytest.raises(FormError):
        gcd(BinaryForm.zero(2), BinaryForm.zero(3))


def test_gcd_normalizes_to_monic():
    lin = P("S + T", e=2)
    F = lin.scale(2)
    G = lin.scale(3) * P("T", e=2)
    assert gcd(F, G) == lin
    assert gcd_many([F, BinaryForm.zero(1, 2)]) == lin
    assert gcd(P("2*S*T", e=2), P("3*T^2", e=2)) == P("T", e=2)


def test_evaluate_examples():
    one = FieldElement(1)
    assert evaluate(P("S^7*T"), one, one) == one
    assert evaluate(S + T, one, one) == FieldElement(0)


def test_zero_form_keeps_degree():
    z = BinaryForm.zero(4)
    assert z.degree == 4 and z.is_zero()
    assert format_form(z) == "0"
    assert parse_form("0", 4) == z
    with pytest.raises(FormSyntaxError):
        parse_form("0")


def test_parse_and_format():
    G = P("S^8 + S^7*T + T^8")
    assert G.coeffs == (1, 1, 0, 0, 0, 0, 0, 0, 1)
    assert format_form(G) == "S^8 + S^7*T + T^8"
    assert P("coeffs:[1,1,0,0,0,0,0,0,1]") == G
    assert P("3*S^2 + T^2", e=2).coeffs == (3, 0, 1)
    assert format_form(P("3*S^2 + T^2", e=2)) == "3*S^2 + T^2"
    assert P("1") == BinaryForm.monomial(0, 0)
    for bad in ["S^2 + T", "S^^2", "X^2", "", "coeffs:1,2", "2*S"]:
        with pytest.raises(FormSyntaxError):
            parse_form(bad)
    with pytest.raises(FormSyntaxError):
        parse_form("S^3", 2)


@given(forms())
def test_format_roundtrip(F):
    assert parse_form(format_form(F), F.degree, F.e) == F
    assert BinaryForm.from_packed(F.degree, F.packed, F.e) == F


@given(same_field_forms())
def test_ring_laws(fs):
    F, G, H = fs
    assert F * G == G * F
    assert (F * G) * H == F * (G * H)
    if G.degree == H.degree:
        assert F * (G + H) == F * G + F * H
    assert list((F * G).coeffs) == convolve(list(F.coeffs), list(G.coeffs), F.e)


@given(forms())
def test_frobenius_forms(G):
    assert pow4(G) == (G * G) * (G * G)
    assert pow5(G) == pow4(G) * G
    assert all(c == 0 for j, c in enumerate(pow4(G).coeffs) if j % 4)


@given(same_field_forms(n=2, same_degree=True))
def test_pow4_additive(fs):
    F, G = fs
    assert pow4(F + G) == pow4(F) + pow4(G)


@given(same_field_forms(n=2))
def test_evaluate_is_multiplicative(fs):
    F, G = fs
    fld = field(F.e)
    for s in range(min(fld.order, 4)):
        for t in range(min(fld.order, 4)):
            a, b = FieldElement(s, F.e), FieldElement(t, F.e)
            assert evaluate(F * G, a, b) == evaluate(F, a, b) * evaluate(G, a, b)


@given(same_field_forms(n=3))
def test_gcd_divides_and_is_maximal(fs):
    F, G, H = fs
    # plant a common factor H
    if H.is_zero():
        return
    A, B = F * H, G * H
    if A.is_zero() and B.is_zero():
        return
    g = gcd(A, B)
    for X in (A, B):
        if not X.is_zero():
            _, r = divmod_forms(X, g)
            assert r.is_zero()
    # the planted factor divides the gcd
    _, r = divmod_forms(g, gcd(g, H))
    assert r.is_zero()
    if not F.is_zero() and not G.is_zero() and gcd(F, G).degree == 0:
        assert g.degree == H.degree


@given(st.lists(st.integers(0, 511), min_size=6, max_size=6))
def test_primitive_bits_matches_gcd(bits):
    fs = [BinaryForm.from_packed(8, b) for b in bits]
    if not any(bits):
        assert not is_primitive_bits(bits, 8)
        return
    assert is_primitive_bits(bits, 8) == (gcd_many(fs).degree == 0)
