"""Arithmetic in GF(2^e) for 1 <= e <= 16.

Elements are ints in ``[0, 2^e)``; bit ``i`` is the coefficient of ``x^i`` in
the polynomial basis.  Each extension degree uses a fixed modulus, the
irreducible polynomial of degree ``e`` with the smallest integer encoding:

    ====  ==========  ====================================
    e     modulus     polynomial
    ====  ==========  ====================================
    1     0x2         x
    2     0x7         x^2 + x + 1
    3     0xb         x^3 + x + 1
    4     0x13        x^4 + x + 1
    5     0x25        x^5 + x^2 + 1
    6     0x43        x^6 + x + 1
    7     0x83        x^7 + x + 1
    8     0x11b       x^8 + x^4 + x^3 + x + 1
    9     0x203       x^9 + x + 1
    10    0x409       x^10 + x^3 + 1
    11    0x805       x^11 + x^2 + 1
    12    0x1009      x^12 + x^3 + 1
    13    0x201b      x^13 + x^4 + x^3 + x + 1
    14    0x4021      x^14 + x^5 + 1
    15    0x8003      x^15 + x + 1
    16    0x1002b     x^16 + x^5 + x^3 + x + 1
    ====  ==========  ====================================

Addition is XOR in every field.  Hot loops work on raw ints through a
:class:`GF2e` instance; :class:`FieldElement` is the value-level wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_EXTENSION = 16

MODULI: dict[int, int] = {
    1: 0x2,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
}


class FieldError(ValueError):
    """Base class for field errors."""


class DegreeMismatch(FieldError):
    """Operands live in different extensions."""


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit-packed GF(2) polynomials."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return r


def poly_mod(a: int, m: int) -> int:
    """Remainder of the GF(2) polynomial ``a`` modulo ``m``."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def spread4(bits: int) -> int:
    """Move bit ``j`` to bit ``4j`` (the fourth power of a GF(2) polynomial)."""
    out = 0
    j = 0
    while bits:
        if bits & 1:
            out |= 1 << (4 * j)
        bits >>= 1
        j += 1
    return out


class GF2e:
    """The field GF(2^e) acting on raw int elements."""

    def __init__(self, e: int):
        if not 1 <= e <= MAX_EXTENSION:
            raise FieldError(f"extension degree must be in [1, {MAX_EXTENSION}], got {e}")
        self.e = e
        self.order = 1 << e
        self.modulus = MODULI[e]
        self.mask = self.order - 1

    def __repr__(self) -> str:
        return f"GF(2^{self.e})"

    def __reduce__(self):
        return (field, (self.e,))

    @property
    def is_prime(self) -> bool:
        return self.e == 1

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise FieldError(f"{a} is not an element of {self!r}")
        return a

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a & b
        return poly_mod(clmul(a, b), self.modulus)

    def pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        # a^(2^e - 2) = a^-1 in the multiplicative group of order 2^e - 1
        return self.pow(a, self.order - 2)

    def frob(self, a: int) -> int:
        return self.mul(a, a)

    def pow4(self, a: int) -> int:
        if self.e <= 2:
            # x^4 = x on GF(2) and GF(4)
            return a
        return self.frob(self.frob(a))

    def element(self, bits: int) -> "FieldElement":
        return FieldElement(self.check(bits), self.e)


@lru_cache(maxsize=None)
def field(e: int) -> GF2e:
    """Shared field instance for extension degree ``e``."""
    return GF2e(e)


GF2 = field(1)


@dataclass(frozen=True, order=True)
class FieldElement:
    """An element of GF(2^e), stored as its polynomial-basis bits."""

    bits: int
    e: int = 1

    def __post_init__(self):
        field(self.e).check(self.bits)

    @property
    def field(self) -> GF2e:
        return field(self.e)

    def _same(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.e != self.e:
            raise DegreeMismatch(f"GF(2^{self.e}) vs GF(2^{other.e})")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._same(other)
        return FieldElement(self.bits ^ other.bits, self.e)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._same(other)
        return FieldElement(self.field.mul(self.bits, other.bits), self.e)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * inv(other)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        return f"FieldElement({self.bits}, e={self.e})"


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def inv(x: FieldElement) -> FieldElement:
    return FieldElement(x.field.inv(x.bits), x.e)


def pow4(x: FieldElement) -> FieldElement:
    """Fourth power, i.e. the square of the Frobenius."""
    return FieldElement(x.field.pow4(x.bits), x.e)


def zero(e: int = 1) -> FieldElement:
    return FieldElement(0, e)


def one(e: int = 1) -> FieldElement:
    return FieldElement(1, e)
