"""Command-line front end for the verification campaigns.

Exit codes: 0 everything certified, 1 I/O failure, 2 usage or precondition
error, 3 some cell inconclusive or some check failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import affine, cantor, lipfun
from .corpus import random_rational
from .exactnum import scalar

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

MAX_TENT_COORDS = 24


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        return scalar(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _params(args: argparse.Namespace) -> cantor.FatCantorParams:
    if args.schedule == cantor.TERNARY:
        return cantor.FatCantorParams.ternary()
    if args.c is None:
        raise UsageError("--c is required for the geometric schedule")
    return cantor.FatCantorParams.geometric(args.c, args.k)


def cmd_cantor_build(args: argparse.Namespace) -> int:
    if args.depth < 1:
        raise UsageError("--depth must be a positive integer")
    params = _params(args)
    cset = cantor.build(params, args.depth)
    print(f"lambda(C) = {params.limit_measure()}")
    print(f"lambda(C_{cset.depth}) = {cset.truncation_measure()}")
    print(f"tail = {cset.tail}")
    if cset.depth <= 6:
        print("components = " + " U ".join(str(iv) for iv in cset.truncation))
    if args.out is not None:
        if cset.depth > cantor.MAX_MATERIALIZED_DEPTH:
            raise UsageError(
                f"--out needs depth <= {cantor.MAX_MATERIALIZED_DEPTH} to list components"
            )
        _emit(cset.to_json(), args.out)
    return EXIT_OK


def cmd_verify_lemma(args: argparse.Namespace) -> int:
    reports = []
    for c in args.c:
        params = cantor.FatCantorParams.geometric(c, args.k)
        report = cantor.lemma_campaign(params, args.grid_step, args.width_target)
        margin = report.min_margin()
        print(
            f"c={c} k={args.k} depth={report.depth} windows={len(report.cells)} "
            f"certified={report.certified} inconclusive={report.inconclusive} "
            f"min_margin={float(margin) if margin is not None else 'n/a'}"
        )
        reports.append(report)
    if args.out is not None:
        _emit({"campaigns": [r.to_json() for r in reports]}, args.out)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_INCONCLUSIVE


def cmd_aap_approx(args: argparse.Namespace) -> int:
    for eps in args.eps:
        if not 0 < eps < 1:
            raise UsageError(f"--eps must lie in (0, 1), got {eps}")
    checks = affine.aap_corpus_check(args.seed, args.count, args.eps, args.max_breakpoints)
    passed = sum(check.ok for check in checks)
    print(f"instances={len(checks)} passed={passed} failed={len(checks) - passed}")
    if args.out is not None:
        _emit(
            {
                "seed": args.seed,
                "eps": [[e.numerator, e.denominator] for e in args.eps],
                "checks": [check.to_json() for check in checks],
                "summary": {"total": len(checks), "passed": passed, "failed": len(checks) - passed},
            },
            args.out,
        )
    return EXIT_OK if passed == len(checks) else EXIT_INCONCLUSIVE


def cmd_verify_failure(args: argparse.Namespace) -> int:
    if not 0 < args.c < 1:
        raise UsageError("--c must lie in (0, 1); no window has length >= c otherwise")
    if args.depth < 1:
        raise UsageError("--depth must be a positive integer")
    report = affine.uniform_aap_falsify(
        args.c, args.grid_step, args.slope, depth_budget=args.depth
    )
    if not report.cells:
        raise UsageError("the grid has no window of length >= c")
    margin = report.min_margin()
    print(
        f"c={args.c} grid_step={args.grid_step} depth={report.depth} cells={len(report.cells)} "
        f"certified={report.certified} inconclusive={report.inconclusive} "
        f"min_margin={float(margin)}"
    )
    if args.out is not None:
        if args.format == "csv":
            _write_text(report.to_csv(), args.out)
        else:
            _emit(report.to_json(), args.out)
    return EXIT_OK if report.ok else EXIT_INCONCLUSIVE


def tent_bases(seed: int, count: int = 32) -> list[Fraction]:
    rng = random.Random(seed)
    return [random_rational(rng, Fraction(0), Fraction(1), 10**6) % 1 for _ in range(count)]


def write_tent_csv(coord_count: int, out: str) -> None:
    """Sample every coordinate on the grid ``i / 2**N``, ``0 <= i < 2**N``.

    Grid values are dyadic with at most ``N`` bits, so the floats are exact.
    """
    total = 2**coord_count
    chunk = 1 << 16
    with open(out, "w") as fh:
        fh.write("t," + ",".join(f"e{n}" for n in range(1, coord_count + 1)) + "\n")
        for start in range(0, total, chunk):
            i = np.arange(start, min(total, start + chunk), dtype=np.int64)
            cols = [i.astype(np.float64) / total]
            cols.append(i.astype(np.float64) / total)
            for n in range(2, coord_count + 1):
                period = 1 << (coord_count - n + 2)
                r = i % period
                cols.append(np.minimum(r, period - r).astype(np.float64) / total)
            np.savetxt(fh, np.column_stack(cols), delimiter=",", fmt="%.17g")


def cmd_tent_example(args: argparse.Namespace) -> int:
    n = args.n
    if not 2 <= n <= MAX_TENT_COORDS:
        raise UsageError(f"--n must lie in 2..{MAX_TENT_COORDS}")
    result = lipfun.tent_suite(n, tent_bases(args.seed))
    print(f"N={n} lip={result.lip.lo} ({'ok' if result.lip_ok else 'FAIL'})")
    p, q = lipfun.symmetric_pair(2)
    quot = lipfun.difference_quotient(lipfun.TentSequenceFunction(n), p, q)
    print(f"quotient at ({p}, {q}) = ({', '.join(str(b.lo) for b in quot)})")
    print(
        f"directional pairs n=2..{n - 1}: "
        f"{sum(ok for _, ok in result.directional)}/{len(result.directional)} equal e1"
    )
    found = sum(w.steps is not None for w in result.witnesses)
    print(f"oscillation witnesses: {found}/{len(result.witnesses)}")
    if args.out is not None:
        write_tent_csv(n, args.out)
    if not (result.lip_ok and result.directional_ok):
        return EXIT_INCONCLUSIVE
    return EXIT_OK if result.witnesses_ok else EXIT_INCONCLUSIVE


def cmd_report(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.input).read_text())
    campaigns = doc["campaigns"] if "campaigns" in doc else [doc]
    bad = 0
    for camp in campaigns:
        if "summary" not in camp:
            raise UsageError("input is not a campaign report")
        s = camp["summary"]
        failed = s.get("inconclusive", s.get("failed", 0))
        bad += failed
        print(" ".join(f"{k}={v}" for k, v in sorted(s.items())))
    return EXIT_OK if bad == 0 else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxaffine",
        description="Certified checks for fat Cantor sets and maximal affine approximation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cantor-build", help="build a fat Cantor truncation")
    p.add_argument("--schedule", choices=[cantor.GEOMETRIC, cantor.TERNARY], default=cantor.GEOMETRIC)
    p.add_argument("--c", type=rational)
    p.add_argument("--k", type=rational, default=Fraction(1, 4))
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cantor_build)

    p = sub.add_parser("verify-lemma", help="certify measure(C ∩ [a,b]) > (b-a)/2 on a window grid")
    p.add_argument("--c", type=rational, nargs="+",
                   default=[Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)])
    p.add_argument("--k", type=rational, default=Fraction(1, 4))
    p.add_argument("--grid-step", type=rational, help="defaults to c/64")
    p.add_argument("--width-target", type=rational, default=Fraction(1, 2**20))
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("aap-approx", help="run the maximal-AAP construction on a seeded corpus")
    p.add_argument("--eps", type=rational, nargs="+", default=[Fraction(1, 10), Fraction(1, 100)])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--max-breakpoints", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_aap_approx)

    p = sub.add_parser("verify-failure", help="certify the minimax error bound on a window x slope grid")
    p.add_argument("--c", type=rational, default=Fraction(1, 2))
    p.add_argument("--grid-step", type=rational, default=Fraction(1, 128))
    p.add_argument("--depth", type=int, default=30)
    p.add_argument("--slope", type=rational, nargs="+", help="override the default slope grid")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_verify_failure)

    p = sub.add_parser("tent-example", help="check the c0-valued tent map and emit plot data")
    p.add_argument("--n", type=int, default=lipfun.DEFAULT_TENT_COORDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV file for coordinate samples")
    p.set_defaults(func=cmd_tent_example)

    p = sub.add_parser("report", help="summarize a JSON campaign report")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except cantor.InfeasibleScheduleError as exc:
        print(f"error: infeasible schedule: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
