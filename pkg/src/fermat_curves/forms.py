"""Binary forms: homogeneous polynomials in S, T over GF(2^e).

A form of degree ``d`` stores coefficients ``c_0..c_d`` where ``c_j`` belongs
to the monomial ``S^(d-j) T^j`` (ascending T-exponent).  The zero form keeps
its declared degree.

Forms also convert to a *packed* int: coefficient ``c_j`` occupies bits
``[j*e, (j+1)*e)``.  Over GF(2) this is just the coefficient bit vector, and
addition of packed values is XOR for every ``e``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce

from .field import GF2e, DegreeMismatch, FieldElement, clmul, field, poly_mod, spread4


class FormError(ValueError):
    pass


class FormSyntaxError(FormError):
    pass


def pack(coeffs, e: int) -> int:
    v = 0
    for j, c in enumerate(coeffs):
        v |= c << (j * e)
    return v


def unpack(v: int, n: int, e: int) -> tuple[int, ...]:
    if e == 1:
        return tuple((v >> j) & 1 for j in range(n))
    mask = (1 << e) - 1
    return tuple((v >> (j * e)) & mask for j in range(n))


@dataclass(frozen=True)
class BinaryForm:
    degree: int
    coeffs: tuple[int, ...]
    e: int = 1

    def __post_init__(self):
        if self.degree < 0:
            raise FormError(f"negative degree {self.degree}")
        if len(self.coeffs) != self.degree + 1:
            raise FormError(
                f"degree {self.degree} form needs {self.degree + 1} coefficients, got {len(self.coeffs)}"
            )
        if self.e == 1:
            if any(c not in (0, 1) for c in self.coeffs):
                raise FormError(f"coefficients {self.coeffs} are not in GF(2)")
            return
        F = field(self.e)
        for c in self.coeffs:
            F.check(c)

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, degree: int, e: int = 1) -> "BinaryForm":
        return cls(degree, (0,) * (degree + 1), e)

    @classmethod
    def monomial(cls, s: int, t: int, coeff: int = 1, e: int = 1) -> "BinaryForm":
        coeffs = [0] * (s + t + 1)
        coeffs[t] = coeff
        return cls(s + t, tuple(coeffs), e)

    @classmethod
    def from_packed(cls, degree: int, v: int, e: int = 1) -> "BinaryForm":
        if v >> ((degree + 1) * e):
            raise FormError(f"packed value too wide for degree {degree}")
        if e == 1 and degree <= 12:
            return _small_gf2_form(degree, v)
        return cls(degree, unpack(v, degree + 1, e), e)

    @classmethod
    def parse(cls, text: str, degree: int | None = None, e: int = 1) -> "BinaryForm":
        return parse_form(text, degree, e)

    # views ----------------------------------------------------------------

    @property
    def field(self) -> GF2e:
        return field(self.e)

    @cached_property
    def packed(self) -> int:
        return pack(self.coeffs, self.e)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def coefficient(self, s: int, t: int) -> FieldElement:
        if s + t != self.degree:
            return FieldElement(0, self.e)
        return FieldElement(self.coeffs[t], self.e)

    def t_valuation(self) -> int | None:
        """Exponent of the largest power of T dividing the form (None for zero)."""
        for j, c in enumerate(self.coeffs):
            if c:
                return j
        return None

    def __str__(self) -> str:
        return format_form(self)

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "BinaryForm") -> None:
        if other.e != self.e:
            raise DegreeMismatch(f"forms over GF(2^{self.e}) and GF(2^{other.e})")

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        self._check(other)
        if other.degree != self.degree:
            raise FormError(f"cannot add forms of degree {self.degree} and {other.degree}")
        return BinaryForm(self.degree, tuple(a ^ b for a, b in zip(self.coeffs, other.coeffs)), self.e)

    __sub__ = __add__

    def __mul__(self, other: "BinaryForm") -> "BinaryForm":
        self._check(other)
        deg = self.degree + other.degree
        if self.e == 1:
            return BinaryForm.from_packed(deg, clmul(self.packed, other.packed))
        F = self.field
        out = [0] * (deg + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] ^= F.mul(a, b)
        return BinaryForm(deg, tuple(out), self.e)

    def scale(self, c: int) -> "BinaryForm":
        F = self.field
        return BinaryForm(self.degree, tuple(F.mul(c, a) for a in self.coeffs), self.e)

    def pow4(self) -> "BinaryForm":
        return pow4(self)

    def pow5(self) -> "BinaryForm":
        return pow5(self)


@lru_cache(maxsize=1 << 16)
def _small_gf2_form(degree: int, v: int) -> BinaryForm:
    return BinaryForm(degree, unpack(v, degree + 1, 1), 1)


def add(F: BinaryForm, G: BinaryForm) -> BinaryForm:
    return F + G


def mul(F: BinaryForm, G: BinaryForm) -> BinaryForm:
    return F * G


def pow4(G: BinaryForm) -> BinaryForm:
    """Coefficient map ``c_j S^(d-j) T^j -> c_j^4 S^(4(d-j)) T^(4j)``."""
    if G.e == 1:
        return BinaryForm.from_packed(4 * G.degree, spread4(G.packed))
    F = G.field
    out = [0] * (4 * G.degree + 1)
    for j, c in enumerate(G.coeffs):
        out[4 * j] = F.pow4(c)
    return BinaryForm(4 * G.degree, tuple(out), G.e)


def pow5(G: BinaryForm) -> BinaryForm:
    return pow4(G) * G


def fifth_power_bits(bits: int) -> int:
    """Fifth power of a packed GF(2) form (degree is implied by the caller)."""
    return clmul(spread4(bits), bits)


def evaluate(G: BinaryForm, s: FieldElement, t: FieldElement) -> FieldElement:
    F = G.field
    if s.e != G.e or t.e != G.e:
        raise DegreeMismatch("evaluation point lives in a different field")
    d = G.degree
    total = 0
    for j, c in enumerate(G.coeffs):
        if c:
            total ^= F.mul(c, F.mul(F.pow(s.bits, d - j), F.pow(t.bits, j)))
    return FieldElement(total, G.e)


# --- gcd -------------------------------------------------------------------

def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _upoly_mod(a: list[int], b: list[int], F: GF2e) -> list[int]:
    a = a[:]
    lead_inv = F.inv(b[-1])
    while len(a) >= len(b):
        q = F.mul(a[-1], lead_inv)
        shift = len(a) - len(b)
        if q:
            for i, c in enumerate(b):
                a[shift + i] ^= F.mul(q, c)
        a.pop()
        _trim(a)
    return a


def _upoly_gcd(a: list[int], b: list[int], F: GF2e) -> list[int]:
    while b:
        a, b = b, _upoly_mod(a, b, F)
    lead_inv = F.inv(a[-1])
    return [F.mul(c, lead_inv) for c in a]


def _int_gcd2(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def gcd(F: BinaryForm, G: BinaryForm) -> BinaryForm:
    """Monic greatest common divisor of two forms, not both zero.

    The forms are dehomogenized at T = 1; the common power of T is tracked
    separately and multiplied back in.  The result has leading S-coefficient 1.
    """
    F._check(G)
    if F.is_zero() and G.is_zero():
        raise FormError("gcd of two zero forms is undefined")
    if G.is_zero():
        F, G = G, F
    if F.is_zero():
        return _monic(G)
    fld = F.field
    nu = min(F.t_valuation(), G.t_valuation())
    # x-power k of F(x, 1) is the coefficient c_(d-k)
    f = _trim(list(reversed(F.coeffs)))
    g = _trim(list(reversed(G.coeffs)))
    h = _upoly_gcd(f, g, fld)
    k = len(h) - 1
    # homogenize h at degree k, then multiply by T^nu
    coeffs = [0] * nu + list(reversed(h))
    return BinaryForm(k + nu, tuple(coeffs), F.e)


def _monic(G: BinaryForm) -> BinaryForm:
    nu = G.t_valuation()
    lead = G.coeffs[nu]
    if lead == 1:
        return G
    return G.scale(G.field.inv(lead))


def gcd_many(forms) -> BinaryForm:
    nonzero = [f for f in forms if not f.is_zero()]
    if not nonzero:
        raise FormError("gcd of zero forms is undefined")
    return reduce(gcd, nonzero[1:], _monic(nonzero[0]))


def is_primitive_bits(forms_bits, degree: int) -> bool:
    """True when packed GF(2) forms of a common degree have no common factor.

    Works with the dehomogenization at S = 1 (bit j is already the coefficient
    of y^j); the common S and T powers are checked separately.
    """
    lo = None
    hi = -1
    g = 0
    for b in forms_bits:
        if not b:
            continue
        low = (b & -b).bit_length() - 1
        top = b.bit_length() - 1
        lo = low if lo is None else min(lo, low)
        hi = max(hi, top)
        g = _int_gcd2(g, b >> low) if g else b >> low
        if g == 1 and lo == 0 and hi == degree:
            return True
    if lo is None:
        return False
    return lo == 0 and hi == degree and g == 1


def divmod_forms(F: BinaryForm, D: BinaryForm) -> tuple[BinaryForm, BinaryForm]:
    """Divide F by D treating both as polynomials in S with T = 1 graded back in.

    Returns ``(Q, R)`` with ``F = Q*D + R``; ``R`` is zero of degree ``F.degree``
    exactly when D divides F.
    """
    F._check(D)
    if D.is_zero():
        raise ZeroDivisionError("division by the zero form")
    fld = F.field
    if F.degree < D.degree:
        raise FormError(f"cannot divide degree {F.degree} by degree {D.degree}")
    qd = F.degree - D.degree
    rem = list(F.coeffs)
    q = [0] * (qd + 1)
    # long division on the T-exponent index, lowest nonzero coefficient of D first
    nu = D.t_valuation()
    lead_inv = fld.inv(D.coeffs[nu])
    for j in range(qd + 1):
        c = rem[j + nu]
        if c:
            m = fld.mul(c, lead_inv)
            q[j] = m
            for i, dc in enumerate(D.coeffs):
                if dc:
                    rem[j + i] ^= fld.mul(m, dc)
    return BinaryForm(qd, tuple(q), F.e), BinaryForm(F.degree, tuple(rem), F.e)


# --- text syntax -----------------------------------------------------------

_MONO = re.compile(
    r"""^(?:(?P<c>\d+)\s*(?:\*\s*|(?=$)))?      # optional integer coefficient
        (?P<vars>(?:[ST](?:\^\d+)?(?:\s*\*\s*[ST](?:\^\d+)?)*)?)$""",
    re.X,
)


def format_form(G: BinaryForm) -> str:
    if G.is_zero():
        return "0"
    d = G.degree
    terms = []
    for j, c in enumerate(G.coeffs):
        if not c:
            continue
        parts = []
        s = d - j
        if s:
            parts.append("S" if s == 1 else f"S^{s}")
        if j:
            parts.append("T" if j == 1 else f"T^{j}")
        if c != 1 or not parts:
            parts.insert(0, str(c))
        terms.append("*".join(parts))
    return " + ".join(terms)


def parse_form(text: str, degree: int | None = None, e: int = 1) -> BinaryForm:
    """Parse ``S^7*T + S^4*T^4`` or ``coeffs:[c0,...,cd]``.

    The zero form is written ``0`` and needs an explicit degree.
    """
    fld = field(e)
    text = text.strip()
    if text.startswith("coeffs:"):
        body = text[len("coeffs:"):].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise FormSyntaxError(f"malformed coefficient list {text!r}")
        try:
            coeffs = tuple(int(x) for x in body[1:-1].split(",") if x.strip())
        except ValueError as exc:
            raise FormSyntaxError(f"malformed coefficient list {text!r}") from exc
        if degree is not None and len(coeffs) != degree + 1:
            raise FormSyntaxError(f"expected {degree + 1} coefficients, got {len(coeffs)}")
        for c in coeffs:
            if not 0 <= c < fld.order:
                raise FormSyntaxError(f"coefficient {c} is not an element of {fld!r}")
        return BinaryForm(len(coeffs) - 1, coeffs, e)

    if not text:
        raise FormSyntaxError("empty form")
    terms: dict[tuple[int, int], int] = {}
    for raw in text.split("+"):
        raw = raw.strip()
        m = _MONO.match(raw)
        if not raw or not m:
            raise FormSyntaxError(f"cannot parse term {raw!r}")
        c = int(m.group("c")) if m.group("c") else 1
        if not m.group("vars") and not m.group("c"):
            raise FormSyntaxError(f"cannot parse term {raw!r}")
        if not 0 <= c < fld.order:
            raise FormSyntaxError(f"coefficient {c} is not an element of {fld!r}")
        s = t = 0
        if m.group("vars"):
            for factor in m.group("vars").split("*"):
                factor = factor.strip()
                var, _, exp = factor.partition("^")
                n = int(exp) if exp else 1
                if var == "S":
                    s += n
                else:
                    t += n
        terms[(s, t)] = terms.get((s, t), 0) ^ c
    degrees = {s + t for (s, t), c in terms.items()}
    if all(c == 0 for c in terms.values()):
        # e.g. "0" or "S + S"
        if degree is None:
            degrees.discard(0)
            if len(degrees) != 1:
                raise FormSyntaxError("zero form needs an explicit degree")
            degree = degrees.pop()
        return BinaryForm.zero(degree, e)
    degrees = {s + t for (s, t), c in terms.items() if c}
    if len(degrees) != 1:
        raise FormSyntaxError(f"form {text!r} is not homogeneous")
    d = degrees.pop()
    if degree is not None and d != degree:
        raise FormSyntaxError(f"form {text!r} has degree {d}, expected {degree}")
    coeffs = [0] * (d + 1)
    for (s, t), c in terms.items():
        if s + t == d:
            coeffs[t] ^= c
    return BinaryForm(d, tuple(coeffs), e)
