"""Maps P^1 -> P^5 landing on the Fermat quintic in characteristic 2.

A curve is a 6-tuple of binary forms of a common degree ``d >= 1`` with no
common factor and ``G_0^5 + ... + G_5^5 = 0``.  All three conditions are
checked when a :class:`CurveMap` is built, including after reading a file.

Curve file format::

    field: 2^1
    degree: 8
    G0 = S^7*T
    G1 = S^4*T^4 + S^3*T^5
    ...
    G5 = coeffs:[1,1,1,1,1,1,1,1,0]

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from . import linalg
from .field import FieldElement, field
from .forms import BinaryForm, FormSyntaxError, format_form, gcd_many, parse_form, pow5


class CurveError(ValueError):
    pass


class NotOnFermat(CurveError):
    def __init__(self, residual: BinaryForm):
        self.residual = residual
        super().__init__(f"sum of fifth powers is {format_form(residual)}, not 0")


class NotPrimitive(CurveError):
    def __init__(self, witness: BinaryForm):
        self.witness = witness
        super().__init__(f"forms share the common factor {format_form(witness)}")


class DegreeMismatch(CurveError):
    pass


class AllZero(CurveError):
    pass


class CurveParseError(CurveError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class CurveMap:
    degree: int
    forms: tuple[BinaryForm, ...]

    def __post_init__(self):
        _validate(self.degree, self.forms)

    @property
    def e(self) -> int:
        return self.forms[0].e

    @property
    def key(self) -> tuple[int, ...]:
        """Packed coefficient words, usable as a sort key."""
        return tuple(G.packed for G in self.forms)

    @classmethod
    def from_bits(cls, degree: int, bits, e: int = 1) -> "CurveMap":
        return cls(degree, tuple(BinaryForm.from_packed(degree, b, e) for b in bits))

    def fifth_power_sum(self) -> BinaryForm:
        return fifth_power_sum(self.forms)

    def dumps(self) -> str:
        return dumps(self)


def fifth_power_sum(forms) -> BinaryForm:
    total = None
    for G in forms:
        p = pow5(G)
        total = p if total is None else total + p
    return total


def _validate(degree: int, forms) -> None:
    if len(forms) != 6:
        raise CurveError(f"a curve needs 6 forms, got {len(forms)}")
    if degree < 1:
        raise DegreeMismatch(f"degree must be >= 1, got {degree}")
    if any(G.degree != degree for G in forms):
        raise DegreeMismatch(f"form degrees {[G.degree for G in forms]} differ from {degree}")
    if len({G.e for G in forms}) != 1:
        raise DegreeMismatch("forms live over different fields")
    if all(G.is_zero() for G in forms):
        raise AllZero("all six forms are zero")
    g = gcd_many(forms)
    if g.degree > 0:
        raise NotPrimitive(g)
    residual = fifth_power_sum(forms)
    if not residual.is_zero():
        raise NotOnFermat(residual)


def validate(forms) -> CurveMap:
    forms = tuple(forms)
    if not forms:
        raise CurveError("no forms given")
    return CurveMap(forms[0].degree, forms)


# --- coefficient matrix -------------------------------------------------------

@dataclass(frozen=True)
class CoefficientMatrix:
    """The 6 x (d+1) matrix whose row i is the coefficient sequence of G_i."""

    rows: tuple[tuple[int, ...], ...]
    e: int = 1

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.rows[i][j], self.e)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def frobenius(self) -> "CoefficientMatrix":
        F = field(self.e)
        return CoefficientMatrix(tuple(tuple(F.pow4(a) for a in r) for r in self.rows), self.e)


def coefficient_matrix(c: CurveMap) -> CoefficientMatrix:
    return CoefficientMatrix(tuple(G.coeffs for G in c.forms), c.e)


def matrix_rank(M: CoefficientMatrix) -> int:
    F = field(M.e)
    e = M.e
    return linalg.rank([_pack(r, e) for r in M.rows], F)


def _pack(row, e: int) -> int:
    v = 0
    for k, a in enumerate(row):
        v |= a << (k * e)
    return v


def multiplication_matrix(c: CurveMap, m: int) -> list[list[int]]:
    """Matrix of ``(A_0..A_5) -> sum A_i G_i`` on multipliers of plain degree ``m``.

    Columns run over the summands, each with basis ``S^m, S^(m-1) T, .., T^m``;
    rows are the monomials of degree ``d + m`` by increasing T-degree.
    """
    d = c.degree
    rows = []
    for k in range(d + m + 1):
        row = []
        for G in c.forms:
            for t in range(m + 1):
                row.append(G.coeffs[k - t] if 0 <= k - t <= d else 0)
        rows.append(row)
    return rows


def pure_identity_columns(d: int) -> list[int]:
    """Columns v for which every coefficient T^(4j+v) of sum G_i^5 is sum_i a_ij^4 a_iv."""
    return [v for v in range(min(4, d + 1)) if v + 4 > d]


def identity_521_sums(c: CurveMap, column: int) -> list[FieldElement]:
    """The sums ``sum_i a_ij^4 a_i,column`` for ``j = 0..d``."""
    d = c.degree
    if column not in pure_identity_columns(d):
        raise ValueError(
            f"column {column} does not give a pure coefficient identity in degree {d}; "
            f"valid columns: {pure_identity_columns(d)}"
        )
    M = coefficient_matrix(c)
    F = field(c.e)
    if c.e == 1:
        # a^4 = a over GF(2): each sum is the parity of a column intersection
        cols = [sum(M.rows[i][j] << i for i in range(6)) for j in range(d + 1)]
        v = cols[column]
        zero, one = FieldElement(0), FieldElement(1)
        return [one if (cj & v).bit_count() & 1 else zero for cj in cols]
    out = []
    for j in range(d + 1):
        s = 0
        for i in range(6):
            s ^= F.mul(F.pow4(M.rows[i][j]), M.rows[i][column])
        out.append(FieldElement(s, c.e))
    return out


def check_identity_521(c: CurveMap, column: int) -> bool:
    """Whether ``sum_i a_ij^4 a_i,column`` vanishes for every ``j``."""
    return not any(identity_521_sums(c, column))


# --- file format --------------------------------------------------------------

_FIELD = re.compile(r"^field\s*:\s*2\s*\^\s*(\d+)$")
_DEGREE = re.compile(r"^degree\s*:\s*(\d+)$")
_FORM = re.compile(r"^G\s*(\d)\s*=\s*(.+)$")


def dumps(c: CurveMap, compact: bool = False) -> str:
    lines = [f"field: 2^{c.e}", f"degree: {c.degree}"]
    for i, G in enumerate(c.forms):
        body = "coeffs:[" + ",".join(map(str, G.coeffs)) + "]" if compact else format_form(G)
        lines.append(f"G{i} = {body}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> CurveMap:
    e = degree = None
    forms: dict[int, BinaryForm] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if e is None:
            m = _FIELD.match(line)
            if not m:
                raise CurveParseError("expected 'field: 2^e'", lineno)
            e = int(m.group(1))
            try:
                field(e)
            except ValueError as exc:
                raise CurveParseError(str(exc), lineno) from exc
            continue
        if degree is None:
            m = _DEGREE.match(line)
            if not m:
                raise CurveParseError("expected 'degree: d'", lineno)
            degree = int(m.group(1))
            continue
        m = _FORM.match(line)
        if not m:
            raise CurveParseError(f"expected 'G<i> = <form>', got {line!r}", lineno)
        i = int(m.group(1))
        if i > 5 or i in forms:
            raise CurveParseError(f"bad or repeated form index G{i}", lineno)
        try:
            forms[i] = parse_form(m.group(2), degree, e)
        except (FormSyntaxError, ValueError) as exc:
            raise CurveParseError(str(exc), lineno) from exc
    if e is None or degree is None:
        raise CurveParseError("missing header")
    if sorted(forms) != list(range(6)):
        raise CurveParseError(f"expected G0..G5, found {sorted(forms)}")
    return CurveMap(degree, tuple(forms[i] for i in range(6)))


def load(path) -> CurveMap:
    return loads(Path(path).read_text())


def dump(c: CurveMap, path, compact: bool = False) -> None:
    Path(path).write_text(dumps(c, compact))
