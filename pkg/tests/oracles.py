"""Slow reference implementations the library is checked against."""

from __future__ import annotations

import itertools

from fermat_curves.field import MODULI


def naive_mul(a: int, b: int, e: int) -> int:
    """Interleaved shift-and-reduce multiplication in GF(2^e)."""
    m = MODULI[e]
    r = 0
    for i in reversed(range(e)):
        r <<= 1
        if r >> e & 1:
            r ^= m
        if b >> i & 1:
            r ^= a
    return r


def _pdivmod(a: int, b: int) -> tuple[int, int]:
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def _pmul(a: int, b: int) -> int:
    r = 0
    i = 0
    while b >> i:
        if b >> i & 1:
            r ^= a << i
        i += 1
    return r


def euclid_inverse(a: int, e: int) -> int:
    """Inverse via the extended Euclidean algorithm on GF(2)[x]."""
    r0, r1 = MODULI[e], a
    s0, s1 = 0, 1
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 ^ _pmul(q, s1)
    assert r0 == 1
    return _pdivmod(s0, MODULI[e])[1]


def is_irreducible(p: int) -> bool:
    d = p.bit_length() - 1
    for q in range(2, 1 << (d // 2 + 1)):
        if 1 <= q.bit_length() - 1 <= d // 2 and _pdivmod(p, q)[1] == 0:
            return False
    return True


def convolve(f: list[int], g: list[int], e: int) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] ^= naive_mul(a, b, e)
    return out


def brute_force_curves(d: int, fifth) -> set[tuple[int, ...]]:
    """Every ordered 6-tuple of GF(2) forms with vanishing fifth-power sum."""
    n = 1 << (d + 1)
    out = set()
    for t in itertools.product(range(n), repeat=6):
        x = 0
        for g in t:
            x ^= fifth[g]
        if not x:
            out.add(t)
    return out
