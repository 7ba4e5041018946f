"""Command-line entry point: ``ajtlab {verdict,lemma,scan,merge,selftest}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .ajt import verdict
from .lemma import FeasibilityError, check_all
from .matrix import MatrixFp, MatrixInputError, SingularMatrixError
from .report import (
    EnvelopeError,
    dumps,
    load_envelope,
    make_envelope,
    verdict_payload,
    write_atomic,
    write_scan_csv,
)
from .scanner import ScanConfig, ScanError, ScanReport, merge, scan, scan_parallel
from .suites import DEFAULT_SEED, format_table, run_all

log = logging.getLogger("ajtlab")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONSISTENT = 2
EXIT_VIOLATION = 3


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); exit 2 is reserved for inconsistencies
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _shard(text: str) -> tuple[int, int]:
    try:
        k, m = (int(t) for t in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shard must look like k/m, got {text!r}") from None
    if not (m >= 1 and 0 <= k < m):
        raise argparse.ArgumentTypeError(f"shard {text!r} needs 0 <= k < m")
    return k, m


def _read_matrix(args) -> MatrixFp:
    if args.rows is not None:
        return MatrixFp.parse(args.rows, args.p)
    with open(args.matrix_file) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        p = data.get("p", args.p)
        if args.p is not None and p != args.p:
            raise MatrixInputError(f"--p {args.p} disagrees with p = {p} in {args.matrix_file}")
        return MatrixFp.from_rows(p, data["rows"])
    return MatrixFp.parse(text, args.p)


def _add_matrix_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, help="prime modulus")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--rows", help='matrix rows, e.g. "1,1;1,2"')
    src.add_argument("--matrix-file", help="file with rows text or JSON {p, rows}")


def _emit(env: dict, out: str | None) -> None:
    text = dumps(env)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_verdict(args) -> int:
    M = _read_matrix(args)
    M.require_nonsingular()
    v = verdict(M)
    config = {"p": M.p, "rows": M.tolist()}
    _emit(make_envelope("verdict", config, verdict_payload(M, v)), args.out)
    if not v.consistent:
        print("inconsistency: z_identity disagrees with witness search", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_lemma(args) -> int:
    M = _read_matrix(args)
    if args.n is not None and args.n != M.n:
        raise MatrixInputError(f"--n {args.n} does not match the {M.n}x{M.n} matrix")
    if not 1 <= args.i <= M.n:
        raise MatrixInputError(f"--i must lie in 1..{M.n}")
    report = check_all(M, args.i - 1, allow_large=args.allow_large, budget=args.budget)
    config = {"p": M.p, "rows": M.tolist(), "i": args.i, "allow_large": args.allow_large, "budget": args.budget}
    _emit(make_envelope("lemma", config, report.to_dict()), args.out)
    failed = [name for name, s in report.steps.items() if s.status == "fails" and not s.conditional]
    if failed:
        print(f"unconditional steps failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def _scan_exit(report: ScanReport) -> int:
    if report.inconsistencies:
        print(f"{len(report.inconsistencies)} inconsistencies detected", file=sys.stderr)
        return EXIT_INCONSISTENT
    if report.violations:
        print(f"{len(report.violations)} matrices violate the conjecture", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _write_scan(report: ScanReport, command: str, config: dict, args) -> None:
    payload = report.to_dict()
    env = make_envelope(command, config, payload, timing={"seconds": round(report.seconds, 3)})
    _emit(env, args.out)
    if args.csv:
        write_scan_csv(args.csv, payload)
    if report.partial:
        print(f"partial report: stopped at counter {report.counter}", file=sys.stderr)


def cmd_scan(args) -> int:
    cfg = ScanConfig(
        p=args.p,
        n=args.n,
        canonicalize=args.canonicalize,
        shard=args.shard,
        max_seconds=args.max_seconds,
        max_matrices=args.max_matrices,
        checkpoint_path=args.checkpoint,
        crosscheck_full=not args.no_crosscheck,
    )
    if args.workers > 1:
        report = scan_parallel(cfg, args.workers)
    else:
        report = scan(cfg)
    config = {
        "p": cfg.p,
        "n": cfg.n,
        "canonicalize": cfg.canonicalize,
        "shard": list(cfg.shard),
        "workers": args.workers,
        "crosscheck_full": cfg.crosscheck_full,
    }
    _write_scan(report, "scan", config, args)
    return _scan_exit(report)


def cmd_merge(args) -> int:
    reports = []
    for path in args.reports:
        env = load_envelope(path)
        if env["payload"].get("kind") != "scan":
            raise EnvelopeError(f"{path} is not a scan report")
        reports.append(ScanReport.from_dict(env["payload"]))
    report = merge(reports)
    _write_scan(report, "merge", {"inputs": list(args.reports)}, args)
    return _scan_exit(report)


def cmd_selftest(args) -> int:
    results = run_all(seed=args.seed, quick=args.quick)
    print(format_table(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_INCONSISTENT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ajtlab", description="Binomial products in group rings and AJT counterexample search.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("verdict", help="fp/Z identities and AJT witness for one matrix")
    _add_matrix_args(sp)
    sp.add_argument("--out", help="write the report here instead of stdout")
    sp.set_defaults(func=cmd_verdict)

    sp = sub.add_parser("lemma", help="step-by-step checks of the reduction lemma")
    _add_matrix_args(sp)
    sp.add_argument("--i", type=int, default=1, help="direction, 1-based (default 1)")
    sp.add_argument("--n", type=int, help="expected dimension (sanity check)")
    sp.add_argument("--budget", type=int, help="coefficient budget for F_p[V'] (capped at 3^15)")
    sp.add_argument("--allow-large", action="store_true", help="raise the budget to 3^15 coefficients")
    sp.add_argument("--out", help="write the report here instead of stdout")
    sp.set_defaults(func=cmd_lemma)

    sp = sub.add_parser("scan", help="exhaustive scan of GL_n(F_p)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--shard", type=_shard, default=(0, 1), help="k/m: scan counters congruent to k mod m")
    sp.add_argument("--workers", type=int, default=1, help="split into this many process shards and merge")
    sp.add_argument("--checkpoint", help="checkpoint file (resumed if present)")
    sp.add_argument("--canonicalize", action="store_true", help="one matrix per monomial orbit")
    sp.add_argument("--max-seconds", type=float, help="stop early with a partial report")
    sp.add_argument("--max-matrices", type=int, help="stop after this many enumeration positions")
    sp.add_argument("--no-crosscheck", action="store_true", help="skip the full-mode fp cross-check")
    sp.add_argument("--out", help="report path (default stdout)")
    sp.add_argument("--csv", help="also write scan tallies as CSV")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("merge", help="merge shard reports of one scan")
    sp.add_argument("reports", nargs="+")
    sp.add_argument("--out", help="report path (default stdout)")
    sp.add_argument("--csv", help="also write scan tallies as CSV")
    sp.set_defaults(func=cmd_merge)

    sp = sub.add_parser("selftest", help="seeded oracle and invariance suites")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--quick", action="store_true", help="reduced case counts")
    sp.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "p", 0) is None and getattr(args, "matrix_file", None) is None:
        parser.error("--p is required with --rows")
    try:
        return args.func(args)
    except (MatrixInputError, SingularMatrixError, FeasibilityError, ScanError, EnvelopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
