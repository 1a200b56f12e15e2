"""Exhaustive search for GF(2)-curves on the Fermat quintic.

Forms of degree ``d`` over GF(2) are the ints ``0 .. 2^(d+1) - 1`` (bit ``j``
is the coefficient of ``S^(d-j) T^j``).  A 6-tuple lies on the quintic when
the XOR of the fifth powers vanishes.

Every solution multiset splits uniquely into

* the set ``D`` of nonzero forms occurring an odd number of times, whose
  fifth powers sum to zero (``|D|`` is 0, 3, 4, 5 or 6 since ``G -> G^5`` is
  injective), and
* padding: ``z`` zero forms and ``p`` repeated pairs, ``|D| + z + 2p = 6``.

The zero-sum sets ``D`` are found meet-in-the-middle: fifth-power sums of all
2- and 3-subsets are hashed (sorted) and equal sums are matched, with
disjointness enforced.  Each padded multiset is one canonical curve (sorted
6-tuple); exact tuples are its distinct permutations.

Every padding slot puts an independent vector into the plain-degree-0
cotangent kernel, and a free curve of degree ``d`` has at most
``5 - d / floor(d/4)`` generators there.  :func:`find_free` skips multisets
with more padding than that (``prune``), which is what makes degree 8 cheap.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import classify as _classify
from .classify import ClassificationReport, audit
from .curve import CurveMap
from .forms import BinaryForm, fifth_power_bits, is_primitive_bits

log = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 8
MAX_DEGREE = 9
DEFAULT_MEMORY_BUDGET = 1 << 30


class SearchError(RuntimeError):
    pass


class DegreeCapExceeded(SearchError):
    pass


class MemoryBudgetExceeded(SearchError):
    pass


DEDUP_POLICIES = ("exact", "canonical", "symmetric")


def degree_cap() -> int:
    return int(os.environ.get("FERMAT_DEGREE_CAP", DEFAULT_DEGREE_CAP))


@dataclass(frozen=True)
class SearchTask:
    degree: int
    dedup: str = "exact"  # or "canonical", "symmetric"
    partition: int = 0
    partitions: int = 1
    allow_degree9: bool = False
    memory_budget: int = DEFAULT_MEMORY_BUDGET

    def __post_init__(self):
        if self.dedup not in DEDUP_POLICIES:
            raise ValueError(f"unknown dedup policy {self.dedup!r}")
        if not 0 <= self.partition < self.partitions:
            raise ValueError(f"partition {self.partition} outside 0..{self.partitions - 1}")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        cap = max(degree_cap(), MAX_DEGREE if self.allow_degree9 else 0)
        if self.degree > min(cap, MAX_DEGREE):
            raise DegreeCapExceeded(
                f"degree {self.degree} exceeds the search cap {min(cap, MAX_DEGREE)}"
                + ("" if self.degree > MAX_DEGREE else " (degree 9 needs allow_degree9)")
            )

    def shard(self, partition: int, partitions: int) -> "SearchTask":
        return SearchTask(self.degree, self.dedup, partition, partitions, self.allow_degree9, self.memory_budget)


@dataclass(frozen=True)
class SearchResult:
    curve: CurveMap
    report: ClassificationReport

    def to_record(self) -> dict:
        return {"curve": self.curve.dumps(), "report": self.report.to_dict()}


@dataclass
class SearchSummary:
    degree: int
    enumerated: int = 0
    valid: int = 0
    multisets: int = 0
    classified: int = 0
    free: int = 0
    very_free: int = 0
    case_4b: int = 0
    pruned: bool = False
    results: list[SearchResult] = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "enumerated": self.enumerated,
            "valid": self.valid,
            "multisets": self.multisets,
            "classified": self.classified,
            "free": self.free,
            "very_free": self.very_free,
            "case_4b": self.case_4b,
            "pruned": self.pruned,
        }

    def merge(self, other: "SearchSummary") -> None:
        for k in ("enumerated", "valid", "multisets", "classified", "free", "very_free", "case_4b"):
            setattr(self, k, getattr(self, k) + getattr(other, k))
        self.pruned = self.pruned or other.pruned
        self.results.extend(other.results)
        self.results.sort(key=lambda r: r.curve.key)


# --- fifth powers and zero-sum sets ------------------------------------------------

@lru_cache(maxsize=None)
def _fifth_power_list(d: int) -> tuple[int, ...]:
    return tuple(fifth_power_bits(g) for g in range(1 << (d + 1)))


def fifth_powers(d: int) -> np.ndarray:
    if 5 * d + 1 > 64:
        raise DegreeCapExceeded(f"degree {d} fifth powers do not fit a 64-bit word")
    return np.array(_fifth_power_list(d), dtype=np.uint64)


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All pairs 1 <= a < b < n."""
    a, b = np.triu_indices(n - 1, 1)
    return (a + 1).astype(np.int64), (b + 1).astype(np.int64)


def _triple_chunks(f5: np.ndarray, residue: int, passes: int):
    """Keys and packed indices of 3-subsets of nonzero forms with key = residue mod passes."""
    n = len(f5)
    bits = (n - 1).bit_length()
    for a in range(1, n - 2):
        bi, ci = np.triu_indices(n - 1 - a, 1)
        b = bi + a + 1
        c = ci + a + 1
        keys = f5[a] ^ f5[b] ^ f5[c]
        if passes > 1:
            keep = (keys % np.uint64(passes)) == residue
            keys, b, c = keys[keep], b[keep], c[keep]
        idx = (np.uint64(a) << np.uint64(2 * bits)) | (b.astype(np.uint64) << np.uint64(bits)) | c.astype(np.uint64)
        yield keys, idx


def _unpack_triple(v: int, bits: int) -> tuple[int, int, int]:
    m = (1 << bits) - 1
    return (v >> (2 * bits), (v >> bits) & m, v & m)


def _passes_needed(n: int, budget: int) -> int:
    triples = math.comb(n - 1, 3)
    # keys and indices, their concatenation, the argsort and the reordered copies
    need = triples * 64
    return max(1, math.ceil(need / budget))


def zero_sum_sets(d: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> dict[int, list[tuple[int, ...]]]:
    """Sets of 3..6 distinct nonzero forms whose fifth powers sum to zero, sorted."""
    return {k: list(v) for k, v in _zero_sum_sets(d, memory_budget).items()}


@lru_cache(maxsize=4)
def _zero_sum_sets(d: int, memory_budget: int) -> dict[int, tuple[tuple[int, ...], ...]]:
    f5 = fifth_powers(d)
    n = len(f5)
    inverse = {int(v): g for g, v in enumerate(f5)}
    pa, pb = _pairs(n)
    pkeys = f5[pa] ^ f5[pb]

    sets3 = set()
    for a, b, k in zip(pa.tolist(), pb.tolist(), pkeys.tolist()):
        c = inverse.get(k)
        if c is not None and c > b:
            sets3.add((a, b, c))

    sets4 = set()
    order = np.argsort(pkeys, kind="stable")
    ks = pkeys[order]
    for group in _equal_runs(ks):
        members = [(int(pa[order[i]]), int(pb[order[i]])) for i in group]
        for x, y in itertools.combinations(members, 2):
            sets4.add(tuple(sorted(x + y)))

    sets5, sets6 = set(), set()
    bits = (n - 1).bit_length()
    passes = _passes_needed(n, memory_budget)
    if passes > 64:
        raise MemoryBudgetExceeded(
            f"degree {d} needs {passes} hash passes under a {memory_budget} byte budget; raise the budget"
        )
    for residue in range(passes):
        chunks = list(_triple_chunks(f5, residue, passes))
        if not chunks:
            continue
        tkeys = np.concatenate([k for k, _ in chunks])
        tidx = np.concatenate([i for _, i in chunks])
        del chunks
        order = np.argsort(tkeys)
        tkeys = tkeys[order]
        tidx = tidx[order]
        del order
        for group in _equal_runs(tkeys):
            members = [_unpack_triple(int(tidx[i]), bits) for i in group]
            for x, y in itertools.combinations(members, 2):
                if not set(x) & set(y):
                    sets6.add(tuple(sorted(x + y)))
        # 5-sets: a pair sum equal to a triple sum
        if passes > 1:
            sel = (pkeys % np.uint64(passes)) == residue
            qa, qb, qk = pa[sel], pb[sel], pkeys[sel]
        else:
            qa, qb, qk = pa, pb, pkeys
        lo = np.searchsorted(tkeys, qk, side="left")
        hi = np.searchsorted(tkeys, qk, side="right")
        for i in np.flatnonzero(hi > lo).tolist():
            pair = (int(qa[i]), int(qb[i]))
            for j in range(lo[i], hi[i]):
                t = _unpack_triple(int(tidx[j]), bits)
                if not set(pair) & set(t):
                    sets5.add(tuple(sorted(pair + t)))
        del tkeys, tidx
    return {
        3: tuple(sorted(sets3)),
        4: tuple(sorted(sets4)),
        5: tuple(sorted(sets5)),
        6: tuple(sorted(sets6)),
    }


def _equal_runs(sorted_keys: np.ndarray):
    """Index ranges of runs of length >= 2 in a sorted array."""
    if len(sorted_keys) < 2:
        return
    eq = sorted_keys[1:] == sorted_keys[:-1]
    if not eq.any():
        return
    starts = np.flatnonzero(np.concatenate(([True], ~eq)))
    ends = np.concatenate((starts[1:], [len(sorted_keys)]))
    for s, e in zip(starts.tolist(), ends.tolist()):
        if e - s > 1:
            yield range(s, e)


# --- canonical multisets -------------------------------------------------------------

def _padded(D: tuple[int, ...], n: int, slack_cap: int | None) -> list[tuple[int, ...]]:
    """All sorted 6-tuples with odd-support D (a nonempty zero-sum set)."""
    free_slots = 6 - len(D)
    out = []
    for p in range(free_slots // 2 + 1):
        z = free_slots - 2 * p
        if slack_cap is not None and z + p > slack_cap:
            continue
        for pairs in itertools.combinations_with_replacement(range(1, n), p):
            out.append(tuple(sorted(D + (0,) * z + tuple(x for x in pairs for _ in (0, 1)))))
    return out


def _pure_padding(n: int, slack_cap: int | None) -> Iterator[tuple[int, ...]]:
    """Sorted 6-tuples made only of zeros and repeated pairs, in increasing order."""
    streams = []
    for p in range(4):
        z = 6 - 2 * p
        if slack_cap is not None and z + p > slack_cap:
            continue
        streams.append(_padding_stream(n, z, p))
    return heapq.merge(*streams)


def _padding_stream(n: int, z: int, p: int) -> Iterator[tuple[int, ...]]:
    zeros = (0,) * z
    for pairs in itertools.combinations_with_replacement(range(1, n), p):
        yield zeros + tuple(x for x in pairs for _ in (0, 1))


def fermat_multisets(
    d: int, slack_cap: int | None = None, memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Every sorted 6-tuple of GF(2) forms of degree ``d`` on the quintic, in increasing order.

    ``slack_cap`` drops multisets with more than that many zero or paired slots.
    """
    n = 1 << (d + 1)
    sets = _zero_sum_sets(d, memory_budget)
    finite = []
    for size in (3, 4, 5, 6):
        for D in sets[size]:
            finite.extend(_padded(D, n, slack_cap))
    finite.sort()
    return heapq.merge(iter(finite), _pure_padding(n, slack_cap))


def slack(ms: tuple[int, ...]) -> int:
    """Number of zero or paired slots of a sorted 6-tuple."""
    counts = Counter(ms)
    zeros = counts.pop(0, 0)
    return zeros + sum(c // 2 for c in counts.values())


def free_slack_cap(d: int) -> int | None:
    """Most degree-0 cotangent generators a free curve of degree ``d`` can have."""
    q = d // 4
    if q == 0:
        return None
    return max(-1, 5 - math.ceil(d / q))


def shard_of(ms: tuple[int, ...], partitions: int) -> int:
    h = 0
    for x in ms:
        h = (h * 1_000_003 + x) & 0xFFFFFFFFFFFF
    return h % partitions


def swap_st(ms: tuple[int, ...], d: int) -> tuple[int, ...]:
    """The sorted tuple after exchanging S and T (reverses each coefficient word)."""
    return tuple(sorted(int(format(g, f"0{d + 1}b")[::-1], 2) for g in ms))


def is_symmetric_rep(ms: tuple[int, ...], d: int) -> bool:
    return ms <= swap_st(ms, d)


def permutation_count(ms: tuple[int, ...]) -> int:
    out = math.factorial(len(ms))
    for c in Counter(ms).values():
        out //= math.factorial(c)
    return out


def distinct_permutations(ms: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of a sorted tuple in lexicographic order."""
    a = list(ms)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def _trusted_curve(d: int, bits: tuple[int, ...]) -> CurveMap:
    """A permutation of an already validated curve (validity is permutation invariant)."""
    c = object.__new__(CurveMap)
    object.__setattr__(c, "degree", d)
    object.__setattr__(c, "forms", tuple(BinaryForm.from_packed(d, b) for b in bits))
    return c


# --- public enumeration ----------------------------------------------------------------

def enumerate_multisets(task: SearchTask, slack_cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Primitive canonical tuples of ``task``'s shard."""
    d = task.degree
    for ms in fermat_multisets(d, slack_cap, task.memory_budget):
        if task.partitions > 1 and shard_of(ms, task.partitions) != task.partition:
            continue
        if is_primitive_bits(ms, d):
            yield ms


def enumerate_bits(task: SearchTask) -> Iterator[tuple[int, ...]]:
    """Packed 6-tuples of every primitive curve on the quintic, per the dedup policy."""
    for ms in enumerate_multisets(task):
        if task.dedup == "exact":
            yield from distinct_permutations(ms)
        elif task.dedup == "canonical" or is_symmetric_rep(ms, task.degree):
            yield ms


def enumerate_on_fermat(task: SearchTask) -> Iterator[CurveMap]:
    d = task.degree
    for ms in enumerate_multisets(task):
        CurveMap.from_bits(d, ms)  # full validation of the orbit representative
        if task.dedup == "exact":
            for perm in distinct_permutations(ms):
                yield _trusted_curve(d, perm)
        elif task.dedup == "canonical" or is_symmetric_rep(ms, d):
            yield _trusted_curve(d, ms)


def ordered_mitm(d: int, partition: int = 0, partitions: int = 1) -> Iterator[tuple[int, ...]]:
    """Literal ordered meet-in-the-middle over all half-tuples, including non-primitive ones.

    Half sums ``G_0^5 + G_1^5 + G_2^5`` of all ``2^(3(d+1))`` ordered triples
    are sorted; a tuple is a solution when its two halves have equal sums.
    Sharding is by sum, so shards are disjoint and their union is complete.
    """
    f5 = fifth_powers(d)
    n = len(f5)
    keys = (f5[:, None, None] ^ f5[None, :, None] ^ f5[None, None, :]).reshape(-1)
    idx = np.arange(n**3, dtype=np.int64)
    if partitions > 1:
        keep = (keys % np.uint64(partitions)) == partition
        keys, idx = keys[keep], idx[keep]
    order = np.argsort(keys, kind="stable")
    keys, idx = keys[order], idx[order]
    starts = np.flatnonzero(np.concatenate(([True], keys[1:] != keys[:-1])))
    ends = np.concatenate((starts[1:], [len(keys)]))
    out = []
    for s, e in zip(starts.tolist(), ends.tolist()):
        group = idx[s:e].tolist()
        halves = [(i // (n * n), (i // n) % n, i % n) for i in group]
        for x in halves:
            for y in halves:
                out.append(x + y)
    out.sort()
    return iter(out)


# --- classification ----------------------------------------------------------------------

def _free_results(d: int, ms: tuple[int, ...], report: ClassificationReport, dedup: str) -> list[SearchResult]:
    if dedup == "exact":
        perms = list(distinct_permutations(ms))
    elif dedup == "canonical" or is_symmetric_rep(ms, d):
        perms = [ms]
    else:
        perms = []
    return [SearchResult(_trusted_curve(d, p), report) for p in perms]


def run(task: SearchTask, prune: bool | None = None, keep_all: bool = False, classifier=None) -> SearchSummary:
    """Classify every curve of the shard and collect the free ones.

    ``prune=None`` prunes from degree 6 on, where padded multisets dominate.
    ``keep_all`` keeps results for non-free curves too.
    """
    classifier = classifier or _classify.classify
    d = task.degree
    if prune is None:
        prune = d >= 6
    cap = free_slack_cap(d) if prune else None
    if prune and cap is None:
        cap = 6  # no pruning is sound when no free type exists
    summary = SearchSummary(d, pruned=bool(prune))
    for ms in fermat_multisets(d, cap, task.memory_budget):
        if task.partitions > 1 and shard_of(ms, task.partitions) != task.partition:
            continue
        count = permutation_count(ms)
        summary.enumerated += count
        summary.multisets += 1
        if not is_primitive_bits(ms, d):
            continue
        summary.valid += count
        canonical = CurveMap.from_bits(d, ms)
        report = classifier(canonical)
        summary.classified += 1
        audit(report)
        if report.free:
            summary.free += count
        if report.very_free:
            summary.very_free += count
        if report.e_case_4b_flag:
            summary.case_4b += count
        if report.free or keep_all:
            summary.results.extend(_free_results(d, ms, report, task.dedup))
    summary.results.sort(key=lambda r: r.curve.key)
    return summary


@dataclass
class RefutationSummary:
    degree: int
    curves: int = 0
    valid_traces: int = 0
    rank_deficient: int = 0
    free: int = 0
    failures: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.curves > 0 and self.valid_traces == self.curves and self.free == 0 and not self.failures

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "curves": self.curves,
            "valid_traces": self.valid_traces,
            "rank_deficient": self.rank_deficient,
            "free": self.free,
            "failures": [list(f) for f in self.failures[:20]],
            "ok": self.ok,
        }


def refute_exhaustive(task: SearchTask, classifier=None) -> RefutationSummary:
    """Classify every primitive degree 4 or 5 curve and replay the refutation on each exact tuple.

    Each orbit is classified once; the trace is built for every permutation.
    """
    classifier = classifier or _classify.classify
    d = task.degree
    if d not in (4, 5):
        raise _classify.WrongDegree(f"refutation covers degrees 4 and 5, not {d}")
    out = RefutationSummary(d)
    for ms in fermat_multisets(d, None, task.memory_budget):
        if task.partitions > 1 and shard_of(ms, task.partitions) != task.partition:
            continue
        if not is_primitive_bits(ms, d):
            continue
        report = classifier(CurveMap.from_bits(d, ms))
        audit(report)
        for p in distinct_permutations(ms):
            out.curves += 1
            if report.free:
                out.free += 1
            try:
                trace = _classify.refute_low_degree(_trusted_curve(d, p), report)
            except _classify.TraceInconsistent:
                out.failures.append(p)
                continue
            out.valid_traces += trace.valid
            out.rank_deficient += trace.case == "rank-deficient"
    return out


def find_free(task: SearchTask, prune: bool | None = None) -> list[SearchResult]:
    return run(task, prune=prune).results


def _run_shard(args):
    task, prune, classifier = args
    return run(task, prune=prune, classifier=classifier)


def run_parallel(
    task: SearchTask, shards: int, workers: int = 1, prune: bool | None = None, classifier=None
) -> SearchSummary:
    """Run ``shards`` partitions (optionally in worker processes) and merge them.

    A custom ``classifier`` must be picklable when ``workers > 1``.
    """
    tasks = [(task.shard(i, shards), prune, classifier) for i in range(shards)]
    if workers > 1 and shards > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_shard, tasks))
    else:
        parts = [_run_shard(t) for t in tasks]
    total = SearchSummary(task.degree, pruned=any(p.pruned for p in parts))
    for p in parts:
        total.merge(p)
    return total
