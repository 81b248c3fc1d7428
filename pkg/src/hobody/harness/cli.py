"""Command-line entry point: ``hobody verify <suite>`` and ``hobody bodies list``.

Exit codes: 0 when every row passes, 1 when a check fails, 2 on usage
errors, 3 on unreadable or malformed input files.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import HobodyError, InvalidArgumentError
from .catalog import CatalogError, bodies_for
from .config import ConfigError, build_config, parse_tolerances
from .report import emit_report
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hobody", description="Higher-order convex body verification harness")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help=f"one of: {', '.join(SUITES)}, or 'all'")
    v.add_argument("--n", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", action="append", metavar="SUITE=VAL", help="relative tolerance floor override")
    v.add_argument("--catalog", help="JSON body catalog replacing the built-in one")
    v.add_argument("--config", help="JSON file preloading any of the flags")
    v.add_argument("--out", help="write the report to this path")
    v.add_argument("--format", choices=("json", "csv"))
    v.add_argument("--quiet", action="store_true", help="suppress the table on stdout")

    b = sub.add_parser("bodies", help="inspect the body catalog")
    bsub = b.add_subparsers(dest="action", required=True)
    lst = bsub.add_parser("list", help="list catalog bodies")
    lst.add_argument("--n", type=int, default=None)
    lst.add_argument("--catalog")
    return p


def _verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        print(f"hobody: unknown suite {args.suite!r}; choose from {', '.join(SUITES)} or all", file=sys.stderr)
        return EXIT_USAGE
    try:
        flags = {"n": args.n, "m": args.m, "samples": args.samples, "seed": args.seed,
                 "catalog": args.catalog, "out": args.out, "format": args.format,
                 "tolerances": parse_tolerances(args.tol)}
        cfg = build_config(flags, args.config)
    except (ConfigError, OSError) as exc:
        print(f"hobody: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidArgumentError as exc:
        print(f"hobody: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        entries = bodies_for(cfg.n, cfg.catalog)
    except CatalogError as exc:
        print(f"hobody: catalog error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ok = True
    for i, name in enumerate(names):
        report = run_suite(name, cfg, entries)
        ok &= report.passed
        if not args.quiet:
            print(f"== {name} (n={cfg.n}, m={cfg.m}, samples={cfg.samples}, seed={cfg.seed}): "
                  f"{'PASS' if report.passed else 'FAIL'}")
            print(report.table())
        if cfg.out:
            path = cfg.out if len(names) == 1 else _suffixed(cfg.out, name)
            try:
                emit_report(report, cfg.format, path)
            except OSError as exc:
                print(f"hobody: cannot write {path}: {exc.strerror}", file=sys.stderr)
                return EXIT_INPUT
    return EXIT_OK if ok else EXIT_FAIL


def _suffixed(path: str, name: str) -> str:
    stem, dot, ext = path.rpartition(".")
    return f"{stem}-{name}.{ext}" if dot else f"{path}-{name}"


def _bodies(args) -> int:
    ns = [args.n] if args.n else [1, 2, 3, 4]
    try:
        for n in ns:
            for e in bodies_for(n, args.catalog):
                print(f"{e.id:<16} n={e.n}  {e.kind:<10} volume={e.body.volume:.10g}"
                      + ("  simplex" if e.simplex else ""))
    except CatalogError as exc:
        print(f"hobody: catalog error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return _verify(args)
        return _bodies(args)
    except HobodyError as exc:
        print(f"hobody: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
