"""Graded kernels of maps ``R^n -> R`` over ``R = k[S, T]`` and their splitting types.

A :class:`KernelSpec` describes ``(A_0, ..., A_{n-1}) -> sum A_i H_i``.  The
kernel is graded by a *level* ``m``: at level ``m`` the multiplier ``A_i`` is a
form of degree ``m - w_i`` (absent when negative) and the image has degree
``m + offset``.  For the two maps attached to a curve all weights are zero and
the level is the plain multiplier degree.

Such a kernel is a graded free module of rank ``n - 1``.  Its minimal
generators are found degree by degree: at each level the kernel is computed
by exact elimination, the part already generated (``S`` and ``T`` times the
previous level) is factored out, and whatever is left contributes new
generators.

Splitting-type conventions for a curve of degree ``d``:

* cotangent side: ``e_i = -d - g_i`` (``g_i`` plain degrees of kernel generators of ``A -> sum A_i G_i``)
* extended tangent: ``f_i = d - h_i`` (``h_i`` for ``A -> sum A_i G_i^4``)
* tangent: ``a_i`` are the generator levels of the dual kernel, see :func:`tangent_splitting`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import linalg
from .field import field
from .forms import BinaryForm, pow4


class GradedError(RuntimeError):
    pass


class GeneratorOverflow(GradedError):
    """More minimal generators than the rank allows."""


class BoundExceeded(GradedError):
    """Generator tracking ran past its degree cap."""


class HilbertMismatch(GradedError):
    """Kernel dimensions disagree with the free module on the found generators."""


class EulerSectionNotInKernel(GradedError):
    pass


OMEGA = "omega"
EXTENDED = "extended"
TANGENT = "tangent"


@dataclass(frozen=True)
class KernelSpec:
    """The map ``(A_i) -> sum A_i H_i``.

    ``targets[i]`` may be ``None`` for a zero target of negative degree; any
    such coordinate is unconstrained.
    """

    targets: tuple[BinaryForm | None, ...]
    weights: tuple[int, ...]
    e: int = 1

    def __post_init__(self):
        if len(self.targets) != len(self.weights):
            raise ValueError("targets and weights must have equal length")
        offs = {H.degree - w for H, w in zip(self.targets, self.weights) if H is not None}
        if len(offs) > 1:
            raise ValueError(f"targets are not homogeneous of a common output degree: {sorted(offs)}")
        if not offs:
            raise ValueError("at least one target must carry a degree")
        if not any(H is not None and not H.is_zero() for H in self.targets):
            raise ValueError("all targets are zero")

    @property
    def offset(self) -> int:
        for H, w in zip(self.targets, self.weights):
            if H is not None:
                return H.degree - w
        raise AssertionError

    @property
    def n(self) -> int:
        return len(self.targets)

    @property
    def rank(self) -> int:
        return self.n - 1

    @property
    def min_level(self) -> int:
        return min(self.weights)

    @property
    def generator_degree_sum(self) -> int:
        """Sum of generator levels forced by the Hilbert polynomial."""
        return sum(self.weights) + self.offset

    def sizes(self, m: int) -> tuple[int, ...]:
        return tuple(max(0, m - w + 1) for w in self.weights)

    def ambient_dimension(self, m: int) -> int:
        return sum(self.sizes(m))

    def images(self, m: int) -> tuple[list[int], int]:
        """Packed images of the monomial basis at level ``m`` and the image width."""
        e = self.e
        width = max(0, m + self.offset + 1)
        out = []
        for H, size in zip(self.targets, self.sizes(m)):
            h = 0 if H is None else H.packed
            for j in range(size):
                # S^(a-j) T^j * H shifts the coefficient index by j
                out.append(h << (j * e))
        return out, width


@dataclass(frozen=True)
class Generator:
    level: int
    forms: tuple[BinaryForm | None, ...]
    packed: int = dc_field(repr=False, compare=False, default=0)


@dataclass(frozen=True)
class GradedKernelBasis:
    spec: KernelSpec
    generators: tuple[Generator, ...]
    dimensions: dict = dc_field(default_factory=dict, compare=False, repr=False)

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(g.level for g in self.generators)

    def residuals(self) -> list[BinaryForm]:
        """``sum A_i H_i`` for every generator (all zero for a valid basis)."""
        out = []
        for g in self.generators:
            total = BinaryForm.zero(g.level + self.spec.offset, self.spec.e) if g.level + self.spec.offset >= 0 else None
            for A, H in zip(g.forms, self.spec.targets):
                if A is None or H is None:
                    continue
                total = A * H if total is None else total + A * H
            out.append(total)
        return out


@dataclass(frozen=True)
class SplittingType:
    entries: tuple[int, ...]
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))
        want = {OMEGA: 5, EXTENDED: 5, TANGENT: 4}.get(self.kind)
        if want is None:
            raise ValueError(f"unknown splitting kind {self.kind!r}")
        if len(self.entries) != want:
            raise ValueError(f"{self.kind} splitting type needs {want} entries, got {len(self.entries)}")

    def expected_sum(self, d: int) -> int:
        return -6 * d if self.kind == OMEGA else d

    def consistent_with_degree(self, d: int) -> bool:
        return sum(self.entries) == self.expected_sum(d)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __len__(self):
        return len(self.entries)


# --- level layouts -----------------------------------------------------------

def _offsets(sizes: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for s in sizes:
        out.append(acc)
        acc += s
    return out


def times_monomial(v: int, sizes_from, sizes_to, t_exp: int, e: int) -> int:
    """Multiply a packed kernel vector by ``S^a T^t_exp`` (``a`` implied by the layouts)."""
    out = 0
    off_from = _offsets(sizes_from)
    off_to = _offsets(sizes_to)
    for a, b, n in zip(off_from, off_to, sizes_from):
        if n:
            block = (v >> (a * e)) & ((1 << (n * e)) - 1)
            if block:
                out |= block << ((b + t_exp) * e)
    return out


def unpack_vector(spec: KernelSpec, m: int, v: int) -> tuple[BinaryForm | None, ...]:
    e = spec.e
    sizes = spec.sizes(m)
    out = []
    for off, n, w in zip(_offsets(sizes), sizes, spec.weights):
        if m - w < 0:
            out.append(None)
            continue
        block = (v >> (off * e)) & ((1 << (n * e)) - 1)
        out.append(BinaryForm.from_packed(m - w, block, e))
    return tuple(out)


def pack_vector(spec: KernelSpec, m: int, forms) -> int:
    e = spec.e
    v = 0
    for off, A in zip(_offsets(spec.sizes(m)), forms):
        if A is not None:
            v |= A.packed << (off * e)
    return v


# --- kernels -----------------------------------------------------------------

def kernel_basis(spec: KernelSpec, m: int) -> list[int]:
    images, width = spec.images(m)
    return linalg.kernel(images, width, field(spec.e))


def kernel_dimension(spec: KernelSpec, m: int) -> int:
    """Dimension of the level-``m`` piece of the kernel."""
    return len(kernel_basis(spec, m))


def free_hilbert(levels: Sequence[int], m: int) -> int:
    """Hilbert function at ``m`` of the free module generated at ``levels``."""
    return sum(max(0, m - g + 1) for g in levels)


def minimal_generators(spec: KernelSpec, cap: int | None = None) -> GradedKernelBasis:
    """Minimal homogeneous generators of the kernel of ``spec``.

    Stops once ``rank`` generators are found and the Hilbert identity holds at
    that level and the next one.
    """
    F = field(spec.e)
    e = spec.e
    r = spec.rank
    m0 = spec.min_level
    if cap is None:
        # every level is >= m0 and the levels sum to generator_degree_sum
        cap = spec.generator_degree_sum - (r - 1) * m0
    gens: list[Generator] = []
    dims: dict[int, int] = {}
    prev: list[int] = []
    prev_sizes = None
    m = m0
    while True:
        if m > cap:
            raise BoundExceeded(f"no complete generating set up to level {cap}")
        K = kernel_basis(spec, m)
        dims[m] = len(K)
        sizes = spec.sizes(m)
        ech = linalg.Echelon(F)
        for b in prev:
            ech.add(times_monomial(b, prev_sizes, sizes, 0, e))
            ech.add(times_monomial(b, prev_sizes, sizes, 1, e))
        for v in K:
            if ech.add(v):
                gens.append(Generator(m, unpack_vector(spec, m, v), v))
        if len(gens) > r:
            raise GeneratorOverflow(f"{len(gens)} minimal generators for a rank-{r} kernel")
        if dims[m] != free_hilbert([g.level for g in gens], m):
            raise HilbertMismatch(f"level {m}: kernel dimension {dims[m]} vs free count")
        if len(gens) == r:
            nxt = kernel_dimension(spec, m + 1)
            dims[m + 1] = nxt
            if nxt != free_hilbert([g.level for g in gens], m + 1):
                raise HilbertMismatch(f"level {m + 1}: kernel dimension {nxt} vs free count")
            break
        prev, prev_sizes = K, sizes
        m += 1
    if sum(g.level for g in gens) != spec.generator_degree_sum:
        raise HilbertMismatch("generator levels do not match the Hilbert polynomial")
    return GradedKernelBasis(spec, tuple(gens), dims)


# --- independent oracle ------------------------------------------------------

def dense_kernel_dimension(spec: KernelSpec, m: int) -> int:
    """Kernel dimension from an explicit row-major matrix and textbook elimination.

    Shares no code with the packed path beyond form multiplication.
    """
    e = spec.e
    n_out = m + spec.offset + 1
    columns = []
    for H, w in zip(spec.targets, spec.weights):
        a = m - w
        for j in range(a + 1):
            if H is None or n_out <= 0:
                columns.append([0] * max(n_out, 0))
                continue
            prod = BinaryForm.monomial(a - j, j, 1, e) * H
            columns.append(list(prod.coeffs))
    if not columns:
        return 0
    if n_out <= 0:
        return len(columns)
    rows = [list(r) for r in zip(*columns)]
    return len(columns) - linalg.dense_rank(rows, e)


def hilbert_generator_levels(spec: KernelSpec, max_level: int | None = None) -> tuple[int, ...]:
    """Generator levels read off the second difference of the Hilbert function."""
    r = spec.rank
    m0 = spec.min_level
    if max_level is None:
        max_level = spec.generator_degree_sum - (r - 1) * m0
    levels: list[int] = []
    h1 = h2 = 0
    for m in range(m0, max_level + 1):
        h = dense_kernel_dimension(spec, m)
        count = h - 2 * h1 + h2
        if count < 0:
            raise HilbertMismatch(f"negative generator count at level {m}")
        levels.extend([m] * count)
        if len(levels) >= r:
            break
        h1, h2 = h, h1
    if len(levels) != r:
        raise BoundExceeded("Hilbert function did not reveal all generators")
    return tuple(levels)


# --- curve-specific kernels ----------------------------------------------------

def omega_spec(curve) -> KernelSpec:
    return KernelSpec(tuple(curve.forms), (0,) * 6, curve.e)


def extended_spec(curve) -> KernelSpec:
    return KernelSpec(tuple(pow4(G) for G in curve.forms), (0,) * 6, curve.e)


def omega_basis(curve) -> GradedKernelBasis:
    return minimal_generators(omega_spec(curve), cap=6 * curve.degree)


def extended_basis(curve, method: str = "direct") -> GradedKernelBasis:
    if method == "direct":
        return minimal_generators(extended_spec(curve), cap=6 * curve.degree)
    if method == "lift":
        return frobenius_lift(omega_basis(curve))
    raise ValueError(f"unknown method {method!r}")


def omega_splitting(curve, basis: GradedKernelBasis | None = None) -> SplittingType:
    basis = basis or omega_basis(curve)
    return SplittingType(tuple(-curve.degree - g for g in basis.levels), OMEGA)


def extended_splitting(curve, method: str = "direct", basis: GradedKernelBasis | None = None) -> SplittingType:
    basis = basis or extended_basis(curve, method)
    return SplittingType(tuple(curve.degree - h for h in basis.levels), EXTENDED)


def frobenius_lift(basis: GradedKernelBasis) -> GradedKernelBasis:
    """Coordinate-wise fourth powers; a level-``g`` generator lands at level ``4g``."""
    spec = basis.spec
    if any(w != 0 for w in spec.weights):
        raise ValueError("Frobenius lift needs an unweighted kernel")
    lifted = KernelSpec(tuple(None if H is None else pow4(H) for H in spec.targets), spec.weights, spec.e)
    gens = []
    for g in basis.generators:
        forms = tuple(pow4(A) for A in g.forms)
        gens.append(Generator(4 * g.level, forms, pack_vector(lifted, 4 * g.level, forms)))
    return GradedKernelBasis(lifted, tuple(gens))


def euler_coordinates(curve, ext: GradedKernelBasis) -> tuple[BinaryForm | None, ...]:
    """Forms ``c_j`` with ``(G_0, ..., G_5) = sum c_j y_j`` in the extended kernel basis.

    ``c_j`` has degree ``f_j = d - h_j`` and is None when that is negative.
    """
    d = curve.degree
    spec = ext.spec
    e = spec.e
    F = field(e)
    residual = BinaryForm.zero(5 * d, e)
    for G in curve.forms:
        residual = residual + pow4(G) * G
    if not residual.is_zero():
        raise EulerSectionNotInKernel("sum of G_i^5 is not zero")
    sizes_d = spec.sizes(d)
    target = pack_vector(spec, d, curve.forms)
    vectors = []
    index = []
    for j, g in enumerate(ext.generators):
        if g.level > d:
            continue
        sizes_g = spec.sizes(g.level)
        for k in range(d - g.level + 1):
            vectors.append(times_monomial(g.packed, sizes_g, sizes_d, k, e))
            index.append((j, k))
    x = linalg.solve(vectors, target, spec.ambient_dimension(d), F)
    if x is None:
        raise EulerSectionNotInKernel("Euler section is not in the span of the extended kernel basis")
    coeffs: list[list[int] | None] = [
        [0] * (d - g.level + 1) if g.level <= d else None for g in ext.generators
    ]
    for pos, (j, k) in enumerate(index):
        coeffs[j][k] = linalg.chunk(x, pos, e)
    return tuple(None if c is None else BinaryForm(len(c) - 1, tuple(c), e) for c in coeffs)


def tangent_spec(curve, ext: GradedKernelBasis) -> KernelSpec:
    coords = euler_coordinates(curve, ext)
    weights = tuple(curve.degree - g.level for g in ext.generators)
    return KernelSpec(coords, weights, curve.e)


def tangent_splitting(curve, ext: GradedKernelBasis | None = None) -> SplittingType:
    """Splitting type of the pulled-back tangent bundle.

    With ``E = sum R(f_j)`` and the Euler section ``sum c_j y_j`` (``deg c_j = f_j``),
    dualizing ``0 -> O -> E -> T -> 0`` identifies the dual of ``T`` with the
    kernel of ``(b_j) -> sum b_j c_j`` on ``sum R(-f_j)``.  Kernels of maps of
    free modules are the full module of sections of the kernel bundle, so a
    generator at twisted degree ``n`` is a summand ``O(-n)`` of the dual and
    ``O(n)`` of ``T``.
    """
    ext = ext or extended_basis(curve, "lift")
    spec = tangent_spec(curve, ext)
    basis = minimal_generators(spec)
    return SplittingType(basis.levels, TANGENT)
