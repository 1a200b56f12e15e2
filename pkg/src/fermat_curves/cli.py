"""Command-line entry point.

Exit statuses:

* 0  success
* 2  usage error (argparse)
* 3  validation failure: a curve file does not parse or is not a curve on X
* 4  mismatch against the reference values
* 5  a verdict contradicting the known degree bounds (would-be counterexample)
* 6  search degree above the cap
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import classify as _classify
from . import curve as _curve
from . import graded, linalg, search

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_MISMATCH = 4
EXIT_CONTRADICTS = 5
EXIT_CAP = 6


def data_path(name: str) -> Path:
    return Path(str(resources.files("fermat_curves") / "data" / name))


def _emit(out, obj, fmt: str, text: str) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _load_curve(path: str) -> _curve.CurveMap:
    return _curve.load(path)


# --- verify-paper ---------------------------------------------------------------

def _format_matrix(rows) -> str:
    return "\n".join(" ".join(map(str, r)) for r in rows)


def _check(diffs: list, label: str, got, want) -> None:
    if got != want:
        diffs.append(f"{label}: expected {want}, got {got}")


def verify_fixture(c: _curve.CurveMap, want: dict, diffs: list, label: str) -> dict:
    report = _classify.classify(c)
    spec = graded.omega_spec(c)
    dims = [graded.kernel_dimension(spec, m) for m in range(len(want["kernel_dimensions"]))]
    _check(diffs, f"{label} kernel dimensions", dims, want["kernel_dimensions"])
    _check(diffs, f"{label} omega type", list(report.omega.entries), want["omega"])
    _check(diffs, f"{label} extended type", list(report.extended.entries), want["extended"])
    _check(diffs, f"{label} free", report.free, want["free"])
    _check(diffs, f"{label} very free", report.very_free, want["very_free"])
    if "tangent_min" in want and min(report.tangent.entries) < want["tangent_min"]:
        diffs.append(f"{label} tangent type {report.tangent.entries} has an entry below {want['tangent_min']}")
    out = {"report": report.to_dict(), "kernel_dimensions": dims}
    if "matrix" in want:
        rows = _curve.multiplication_matrix(c, want["matrix_degree"])
        r = linalg.dense_rank(rows)
        _check(diffs, f"{label} matrix", rows, want["matrix"])
        _check(diffs, f"{label} matrix rank", r, want["matrix_rank"])
        out["matrix"] = rows
        out["matrix_rank"] = r
    return out


def verify_numerology(want: dict, diffs: list, degrees=range(1, 10)) -> list[dict]:
    verdicts = [_classify.admissible_types(d) for d in degrees]
    by_d = {v.degree: v for v in verdicts}
    for d in want["no_free"]:
        _check(diffs, f"free types in degree {d}", list(by_d[d].admissible_free_e_types), [])
    for d, t in want["unique_free"].items():
        _check(diffs, f"free types in degree {d}", [list(x) for x in by_d[int(d)].admissible_free_e_types], [t])
    for d, t in want["unique_very_free"].items():
        got = [list(x) for x in by_d[int(d)].admissible_very_free_e_types]
        _check(diffs, f"very free types in degree {d}", got, [t])
    for d in want["no_very_free"]:
        _check(diffs, f"very free types in degree {d}", list(by_d[d].admissible_very_free_e_types), [])
    return [v.to_dict() for v in verdicts]


def _verdict_text(v: dict) -> str:
    fmt = lambda ts: ", ".join("(" + ",".join(map(str, t)) + ")" for t in ts) or "none"  # noqa: E731
    return f"d={v['degree']}: free {fmt(v['free_e_types'])}; very free {fmt(v['very_free_e_types'])}"


def cmd_verify_paper(args, out) -> int:
    # reference values always come from the package; --data-dir only swaps the curves
    want = json.loads(data_path("expected.json").read_text())
    path = (lambda n: Path(args.data_dir) / n) if args.data_dir else data_path
    diffs: list[str] = []
    fixtures = {}
    for key in ("degree8", "degree9"):
        c = _load_curve(str(path(want[key]["file"])))
        fixtures[key] = verify_fixture(c, want[key], diffs, key)
    types = verify_numerology(want["numerology"], diffs)
    result = {"fixtures": fixtures, "admissible_types": types, "mismatches": diffs, "ok": not diffs}
    lines = []
    for key, res in fixtures.items():
        lines.append(f"== {key}")
        lines.append(_classify.ClassificationReport.from_dict(res["report"]).to_text())
        lines.append("kernel dimensions: " + ", ".join(map(str, res["kernel_dimensions"])))
        if "matrix" in res:
            lines.append("multiplication matrix in plain degree 1:")
            lines.append(_format_matrix(res["matrix"]))
            lines.append(f"rank: {res['matrix_rank']}")
    lines.append("== admissible types")
    lines.extend(_verdict_text(v) for v in types)
    lines.extend(f"MISMATCH {d}" for d in diffs)
    lines.append("all checks passed" if not diffs else f"{len(diffs)} mismatches")
    _emit(out, result, args.format, "\n".join(lines))
    return EXIT_OK if not diffs else EXIT_MISMATCH


# --- per-curve commands ------------------------------------------------------------

def cmd_split(args, out) -> int:
    c = _load_curve(args.input)
    report = _classify.classify(c, method=args.method)
    _emit(out, report.to_dict(), args.format, report.to_text())
    return EXIT_OK


def cmd_classify(args, out, classifier=None) -> int:
    c = _load_curve(args.input)
    report = (classifier or _classify.classify)(c)
    _emit(out, report.to_dict(), args.format, report.to_text())
    _classify.audit(report)
    return EXIT_OK


def cmd_enumerate_types(args, out) -> int:
    lo, hi = (args.degree, args.degree) if args.degree else (1, args.max_degree)
    for d in range(lo, hi + 1):
        v = _classify.admissible_types(d).to_dict()
        _emit(out, v, args.format, _verdict_text(v))
    return EXIT_OK


def _trace_text(trace: _classify.RefutationTrace) -> str:
    lines = [f"degree {trace.degree}, rank {trace.rank} of {trace.max_rank} ({trace.case})"]
    lines += [f"  [{'ok' if s.ok else 'FAIL'}] {s.name}: {s.value}" for s in trace.steps]
    lines.append(f"conclusion: {trace.conclusion}")
    lines.append("trace valid" if trace.valid else "trace INVALID")
    return "\n".join(lines)


def cmd_refute(args, out, classifier=None) -> int:
    if args.input:
        c = _load_curve(args.input)
        report = (classifier or _classify.classify)(c)
        _classify.audit(report)
        try:
            trace = _classify.refute_low_degree(c, report)
        except _classify.TraceInconsistent as exc:
            if exc.trace is not None:
                _emit(out, exc.trace.to_dict(), args.format, _trace_text(exc.trace))
            raise
        _emit(out, trace.to_dict(), args.format, _trace_text(trace))
        return EXIT_OK if trace.valid else EXIT_MISMATCH
    if args.degree is None:
        raise SystemExit("refute needs a curve file or --degree")
    summary = search.refute_exhaustive(search.SearchTask(args.degree), classifier)
    s = summary.to_dict()
    text = (
        f"degree {s['degree']}: {s['curves']} curves, {s['valid_traces']} valid traces, "
        f"{s['rank_deficient']} rank deficient, {s['free']} free"
    )
    _emit(out, s, args.format, text)
    return EXIT_OK if summary.ok else EXIT_MISMATCH


def cmd_search(args, out, classifier=None) -> int:
    task = search.SearchTask(args.degree, dedup=args.dedup, allow_degree9=args.allow_degree9)
    workers = args.threads or os.cpu_count() or 1
    prune = False if args.no_prune else None
    summary = search.run_parallel(task, args.shards, workers, prune=prune, classifier=classifier)
    for r in summary.results:
        rec = r.to_record()
        _emit(out, rec, args.format, rec["curve"] + r.report.to_text() + "\n")
    s = summary.to_dict()
    text = "summary: " + ", ".join(f"{k} = {v}" for k, v in s.items())
    _emit(out, {"summary": s}, args.format, text)
    return EXIT_OK


# --- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermat-curves", description="Rational curves on the Fermat quintic in characteristic 2.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    v = common(sub.add_parser("verify-paper", help="recheck the bundled degree 8 and 9 curves"))
    v.add_argument("--data-dir", help="directory with replacement fixture files")

    s = common(sub.add_parser("split", help="splitting types of a curve file"))
    s.add_argument("input")
    s.add_argument("--method", choices=("lift", "direct"), default="lift")

    c = common(sub.add_parser("classify", help="classify a curve file and audit the verdict"))
    c.add_argument("input")

    t = common(sub.add_parser("enumerate-types", help="admissible splitting types by degree"))
    t.add_argument("--degree", type=int)
    t.add_argument("--max-degree", type=int, default=9)

    r = common(sub.add_parser("refute", help="replay the degree 4/5 refutation"))
    r.add_argument("input", nargs="?")
    r.add_argument("--degree", type=int, choices=(4, 5))

    q = common(sub.add_parser("search", help="exhaustive search over GF(2)"))
    q.add_argument("--degree", type=int, required=True)
    q.add_argument("--shards", type=int, default=1)
    q.add_argument("--threads", type=int, default=0, help="worker processes (default: all CPUs)")
    q.add_argument("--dedup", choices=search.DEDUP_POLICIES, default="exact")
    q.add_argument("--no-prune", action="store_true", help="classify padded multisets too")
    q.add_argument("--allow-degree9", action="store_true")
    return p


def main(argv=None, out=None, classifier=None) -> int:
    """Run one subcommand; ``classifier`` replaces the classifier (for tests)."""
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    handlers = {
        "verify-paper": lambda: cmd_verify_paper(args, out),
        "split": lambda: cmd_split(args, out),
        "classify": lambda: cmd_classify(args, out, classifier),
        "enumerate-types": lambda: cmd_enumerate_types(args, out),
        "refute": lambda: cmd_refute(args, out, classifier),
        "search": lambda: cmd_search(args, out, classifier),
    }
    try:
        return handlers[args.subcommand]()
    except _classify.ContradictsPaper as exc:
        print(f"contradiction with known bounds: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTS
    except search.DegreeCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (_curve.CurveError, OSError) as exc:
        print(f"invalid curve: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (_classify.TraceInconsistent, _classify.WrongDegree) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
