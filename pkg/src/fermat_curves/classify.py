"""Free / very free verdicts, splitting-type numerology, and the low-degree refutation.

A curve is free exactly when every extended-tangent twist ``f_i`` is >= 0 and
very free exactly when every tangent twist ``a_i`` is >= 1.  Very-freeness is
read from the tangent type so the ambiguous E-type with a single zero entry
never needs a rule of its own; such curves are only flagged.
"""

from __future__ import annotations

import json
from functools import lru_cache
from dataclasses import dataclass, field as dc_field
from typing import Any

from . import graded
from .curve import CurveMap, coefficient_matrix, identity_521_sums, matrix_rank, _pack
from .field import field
from .graded import EXTENDED, OMEGA, TANGENT, SplittingType
from . import linalg

# lowest degree with a free curve, lowest degree with a very free curve
FREE_MIN_DEGREE = 8
VERY_FREE_MIN_DEGREE = 9


class ClassificationError(RuntimeError):
    pass


class ContradictsPaper(ClassificationError):
    """A verdict that would be a counterexample to the known degree bounds."""

    def __init__(self, reason: str, report: "ClassificationReport | None" = None):
        self.reason = reason
        self.report = report
        super().__init__(reason)


class WrongDegree(ClassificationError):
    pass


class TraceInconsistent(ClassificationError):
    def __init__(self, message: str, trace: "RefutationTrace | None" = None):
        self.trace = trace
        super().__init__(message)


@dataclass(frozen=True)
class ClassificationReport:
    degree: int
    omega: SplittingType
    extended: SplittingType
    tangent: SplittingType
    free: bool
    very_free: bool
    e_case_4b_flag: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "omega": list(self.omega.entries),
            "extended": list(self.extended.entries),
            "tangent": list(self.tangent.entries),
            "free": self.free,
            "very_free": self.very_free,
            "case_4b": self.e_case_4b_flag,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        fmt = lambda t: "(" + ", ".join(map(str, t.entries)) + ")"  # noqa: E731
        return "\n".join(
            [
                f"degree:     {self.degree}",
                f"omega:      {fmt(self.omega)}",
                f"extended:   {fmt(self.extended)}",
                f"tangent:    {fmt(self.tangent)}",
                f"free:       {'yes' if self.free else 'no'}",
                f"very free:  {'yes' if self.very_free else 'no'}",
                f"case 4b:    {'yes' if self.e_case_4b_flag else 'no'}",
            ]
        )

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ClassificationReport":
        return cls(
            data["degree"],
            SplittingType(tuple(data["omega"]), OMEGA),
            SplittingType(tuple(data["extended"]), EXTENDED),
            SplittingType(tuple(data["tangent"]), TANGENT),
            data["free"],
            data["very_free"],
            data["case_4b"],
        )

    def check(self) -> None:
        """Re-derive every verdict from the splitting types."""
        d = self.degree
        e, f, a = self.omega.entries, self.extended.entries, self.tangent.entries
        problems = []
        if sum(e) != -6 * d:
            problems.append(f"sum of omega type {sum(e)} != {-6 * d}")
        if sum(f) != d:
            problems.append(f"sum of extended type {sum(f)} != {d}")
        if sum(a) != d:
            problems.append(f"sum of tangent type {sum(a)} != {d}")
        if tuple(4 * x + 5 * d for x in e) != f:
            problems.append("extended type is not 4e + 5d")
        if self.free != (min(f) >= 0):
            problems.append("free verdict disagrees with the extended type")
        if (min(f) >= 0) != (min(a) >= 0):
            problems.append("extended and tangent types disagree on freeness")
        if self.very_free != (min(a) >= 1):
            problems.append("very free verdict disagrees with the tangent type")
        if min(f) > 0 and not self.very_free:
            problems.append("all f_i > 0 but not very free")
        if f.count(0) >= 2 and self.very_free:
            problems.append("two zero twists but very free")
        if self.e_case_4b_flag != _is_case_4b(f):
            problems.append("case 4b flag is wrong")
        if problems:
            raise ClassificationError("; ".join(problems))


def _is_case_4b(f) -> bool:
    return f.count(0) == 1 and all(x >= 0 for x in f)


def classify(c: CurveMap, method: str = "lift") -> ClassificationReport:
    """Compute all three splitting types of ``c`` and the verdicts.

    ``method`` picks how the extended kernel basis is obtained: ``"lift"``
    raises the cotangent generators to the fourth power, ``"direct"`` runs the
    generator search on ``A -> sum A_i G_i^4``.
    """
    obasis = graded.omega_basis(c)
    omega = graded.omega_splitting(c, obasis)
    ebasis = graded.frobenius_lift(obasis) if method == "lift" else graded.extended_basis(c, method)
    extended = graded.extended_splitting(c, basis=ebasis)
    tangent = graded.tangent_splitting(c, ebasis)
    report = ClassificationReport(
        c.degree,
        omega,
        extended,
        tangent,
        free=min(extended.entries) >= 0,
        very_free=min(tangent.entries) >= 1,
        e_case_4b_flag=_is_case_4b(extended.entries),
    )
    report.check()
    return report


def audit(report: ClassificationReport) -> None:
    """Raise :class:`ContradictsPaper` for verdicts outside the known bounds."""
    d = report.degree
    if report.free and d < FREE_MIN_DEGREE:
        raise ContradictsPaper(f"free curve of degree {d} < {FREE_MIN_DEGREE}", report)
    if report.very_free and d < VERY_FREE_MIN_DEGREE:
        raise ContradictsPaper(f"very free curve of degree {d} < {VERY_FREE_MIN_DEGREE}", report)
    if report.very_free and report.e_case_4b_flag:
        raise ContradictsPaper("very free curve with exactly one zero extended twist", report)
    if report.free and not report.very_free and d % 4:
        raise ContradictsPaper(f"free but not very free in degree {d}, not divisible by 4", report)


# --- numerology ----------------------------------------------------------------

@dataclass(frozen=True)
class DegreeVerdict:
    degree: int
    admissible_free_e_types: tuple[tuple[int, ...], ...]
    admissible_very_free_e_types: tuple[tuple[int, ...], ...]
    open_case_e_types: tuple[tuple[int, ...], ...] = ()

    @property
    def free_possible(self) -> bool:
        return bool(self.admissible_free_e_types)

    @property
    def very_free_possible(self) -> bool:
        return bool(self.admissible_very_free_e_types or self.open_case_e_types)

    def f_type(self, e_type) -> tuple[int, ...]:
        return tuple(4 * x + 5 * self.degree for x in e_type)

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "free_e_types": [list(t) for t in self.admissible_free_e_types],
            "free_f_types": [list(self.f_type(t)) for t in self.admissible_free_e_types],
            "very_free_e_types": [list(t) for t in self.admissible_very_free_e_types],
            "very_free_f_types": [list(self.f_type(t)) for t in self.admissible_very_free_e_types],
            "open_case_e_types": [list(t) for t in self.open_case_e_types],
            "free_possible": self.free_possible,
            "very_free_possible": self.very_free_possible,
        }


def _partitions(total: int, parts: int, lo: int, step: int):
    """Nondecreasing tuples of ``parts`` values >= lo, congruent to lo mod step, summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    v = lo
    while v * parts <= total:
        for rest in _partitions(total - v, parts - 1, v, step):
            yield (v,) + rest
        v += step


@lru_cache(maxsize=None)
def admissible_types(d: int) -> DegreeVerdict:
    """Splitting types allowed by the degree sums and the twist bound.

    Works on the extended side: ``f_i = 4 e_i + 5 d`` forces ``f_i = d mod 4``.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    r = d % 4
    free_f = list(_partitions(d, 5, r, 4))
    to_e = lambda f: tuple((x - 5 * d) // 4 for x in f)  # noqa: E731
    free = tuple(to_e(f) for f in free_f)
    very = tuple(to_e(f) for f in free_f if min(f) > 0)
    open_case = tuple(to_e(f) for f in free_f if _is_case_4b(f))
    return DegreeVerdict(d, free, very, open_case)


# --- degree 4 and 5 refutation ---------------------------------------------------

@dataclass(frozen=True)
class Step:
    name: str
    value: Any
    ok: bool


@dataclass
class RefutationTrace:
    degree: int
    rank: int
    max_rank: int
    case: str
    steps: list[Step] = dc_field(default_factory=list)
    conclusion: str = ""

    @property
    def valid(self) -> bool:
        return bool(self.steps) and all(s.ok for s in self.steps)

    def record(self, name: str, value: Any, ok: bool) -> None:
        self.steps.append(Step(name, value, ok))

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "rank": self.rank,
            "max_rank": self.max_rank,
            "case": self.case,
            "steps": [{"name": s.name, "value": _jsonable(s.value), "ok": s.ok} for s in self.steps],
            "conclusion": self.conclusion,
            "valid": self.valid,
        }


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def row_times_matrix(row, rows, e: int) -> tuple[int, ...]:
    """The row vector ``row`` times the matrix with the given rows."""
    F = field(e)
    n = len(rows[0])
    out = [0] * n
    for x, r in zip(row, rows):
        if x:
            for j, a in enumerate(r):
                out[j] ^= F.mul(x, a)
    return tuple(out)


def frobenius_contradiction_steps(rows, d: int, e: int = 1) -> list[Step]:
    """The maximal-rank branch of the argument, on a raw 6 x (d+1) matrix.

    For d = 4 the columns 1 and 3 must lie in the left kernel of the matrix
    of fourth powers, which then has dimension >= 2 although its rank is 5.
    For d = 5 column 2 must be a nonzero left-kernel vector of an invertible
    matrix.  On a genuine curve these steps cannot all pass.
    """
    F = field(e)
    bar = tuple(tuple(F.pow4(a) for a in r) for r in rows)
    rank_bar = linalg.rank([_pack(r, e) for r in bar], F)
    steps = [Step("rank of fourth-power matrix", rank_bar, rank_bar == d + 1)]
    cols = (1, 3) if d == 4 else (2,)
    vecs = []
    for v in cols:
        col = tuple(r[v] for r in rows)
        prod = row_times_matrix(col, bar, e)
        steps.append(Step(f"column {v} times fourth-power matrix", prod, not any(prod)))
        steps.append(Step(f"column {v} nonzero", col, any(col)))
        vecs.append(_pack(col, e))
    if d == 4:
        ind = linalg.rank(vecs, F)
        steps.append(Step("columns 1 and 3 independent", ind, ind == 2))
        left_kernel = 6 - rank_bar
        steps.append(Step("left kernel dimension of fourth-power matrix", left_kernel, left_kernel >= 2))
    else:
        steps.append(Step("fourth-power matrix invertible", rank_bar, rank_bar == 6))
    return steps


def refute_low_degree(c: CurveMap, report: ClassificationReport | None = None) -> RefutationTrace:
    """Replay the proof that a degree 4 or 5 curve is not free.

    A free curve in these degrees has the unique admissible cotangent type,
    all of whose generators sit in plain degree <= 1, so the coefficient
    matrix would have maximal rank.  Rank-deficient curves are therefore not
    free; maximal rank is refuted by the Frobenius argument.
    """
    d = c.degree
    if d not in (4, 5):
        raise WrongDegree(f"refutation covers degrees 4 and 5, not {d}")
    M = coefficient_matrix(c)
    r = matrix_rank(M)
    max_rank = d + 1
    trace = RefutationTrace(d, r, max_rank, "rank-deficient" if r < max_rank else "maximal-rank")

    verdict = admissible_types(d)
    plain = [tuple(-d - x for x in t) for t in verdict.admissible_free_e_types]
    forces = all(max(g) <= 1 for g in plain)
    trace.record("admissible free cotangent types", verdict.admissible_free_e_types, len(plain) == 1)
    trace.record("free type has all generators in plain degree <= 1", plain, forces)
    for v in graded_columns(d):
        holds = check_column(c, v)
        trace.record(f"identity for column {v}", holds, holds)

    if r < max_rank:
        k0 = _degree0_kernel(c.degree, tuple(sorted(c.key)))
        trace.record("rank of coefficient matrix below maximal", r, r < max_rank)
        trace.record("plain degree 0 kernel dimension equals 6 - rank", k0, k0 == 6 - r)
        trace.conclusion = "not free: a free curve would need a surjective degree-d map"
    else:
        for s in frobenius_contradiction_steps(M.rows, d, c.e):
            trace.steps.append(s)
        trace.conclusion = "maximal rank is impossible on the Fermat quintic"
        # a genuine curve cannot satisfy every step of this branch
        raise TraceInconsistent("a valid curve reached the maximal-rank branch", trace)

    report = report or classify(c)
    trace.record("classifier agrees: not free", report.free, not report.free)
    if not trace.valid:
        raise TraceInconsistent("refutation step failed: " + ", ".join(s.name for s in trace.steps if not s.ok), trace)
    return trace


@lru_cache(maxsize=1 << 17)
def _degree0_kernel(d: int, key: tuple[int, ...]) -> int:
    # invariant under permuting the forms, so one computation per orbit
    return graded.kernel_dimension(graded.omega_spec(CurveMap.from_bits(d, key)), 0)


def graded_columns(d: int) -> tuple[int, ...]:
    return (1, 3) if d == 4 else (2,)


def check_column(c: CurveMap, v: int) -> bool:
    return not any(identity_521_sums(c, v))
