"""Exact linear algebra over GF(2^e) on packed int vectors.

A vector is an int whose ``e``-bit chunk ``k`` holds coordinate ``k``.  Sums
are XOR, so over GF(2) every row operation is a single machine-word XOR per
64 coordinates.  Pivots are chosen at the lowest nonzero coordinate.

``dense_rank`` is a deliberately separate row-major implementation used as
an oracle against the packed routines.
"""

from __future__ import annotations

from .field import GF2e, field


def lowest_chunk(v: int, e: int) -> int:
    b = (v & -v).bit_length() - 1
    return b if e == 1 else b // e


def chunk(v: int, k: int, e: int) -> int:
    return (v >> (k * e)) & ((1 << e) - 1)


def scale(v: int, c: int, F: GF2e) -> int:
    if c == 1:
        return v
    if c == 0:
        return 0
    e = F.e
    mask = F.mask
    out = 0
    k = 0
    while v:
        a = v & mask
        if a:
            out |= F.mul(a, c) << (k * e)
        v >>= e
        k += 1
    return out


class Echelon:
    """Incrementally built row-echelon basis keyed by pivot coordinate."""

    def __init__(self, F: GF2e):
        self.F = F
        self.pivots: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, v: int) -> int:
        e = self.F.e
        piv = self.pivots
        while v:
            p = lowest_chunk(v, e)
            row = piv.get(p)
            if row is None:
                return v
            if e == 1:
                v ^= row
            else:
                v ^= scale(row, chunk(v, p, e), self.F)
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; return True when it enlarged the span."""
        v = self.reduce(v)
        if not v:
            return False
        e = self.F.e
        p = lowest_chunk(v, e)
        if e != 1:
            v = scale(v, self.F.inv(chunk(v, p, e)), self.F)
        self.pivots[p] = v
        return True


def rank(vectors, F: GF2e) -> int:
    ech = Echelon(F)
    for v in vectors:
        ech.add(v)
    return len(ech)


def kernel(images, width: int, F: GF2e) -> list[int]:
    """Basis of ``{x : sum x_k images[k] = 0}``.

    ``images[k]`` is the packed image of the k-th unknown and occupies at most
    ``width`` chunks.  Returned vectors are packed over the unknowns.
    """
    e = F.e
    shift = width * e
    low_mask = (1 << shift) - 1
    piv: dict[int, int] = {}
    out = []
    for k, img in enumerate(images):
        v = img | (1 << (k * e + shift))
        while True:
            if not v & low_mask:
                out.append(v >> shift)
                break
            p = lowest_chunk(v, e)
            row = piv.get(p)
            if row is None:
                if e != 1:
                    v = scale(v, F.inv(chunk(v, p, e)), F)
                piv[p] = v
                break
            v ^= row if e == 1 else scale(row, chunk(v, p, e), F)
    return out


def solve(vectors, target: int, width: int, F: GF2e) -> int | None:
    """Packed coefficients ``x`` with ``sum x_k vectors[k] == target``, or None."""
    e = F.e
    shift = width * e
    low_mask = (1 << shift) - 1
    ech = Echelon(F)
    for k, v in enumerate(vectors):
        ech.add(v | (1 << (k * e + shift)))
    # pivots sit in the low part whenever the low part is nonzero, so
    # rows whose low part vanished are never used as pivots here
    t = target
    piv = ech.pivots
    while t & low_mask:
        p = lowest_chunk(t, e)
        row = piv.get(p)
        if row is None or p * e >= shift:
            return None
        t ^= row if e == 1 else scale(row, chunk(t, p, e), F)
    return t >> shift


def dense_rank(rows: list[list[int]], e: int = 1) -> int:
    """Rank of a row-major matrix of field ints by textbook elimination."""
    F = field(e)
    m = [list(r) for r in rows]
    if not m:
        return 0
    n_cols = len(m[0])
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x ^ F.mul(f, y) for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r
