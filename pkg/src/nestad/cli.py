"""``nestad eval <file|->``: value and derivatives of an expression program.

Exit codes: 0 success, 1 parse/validation error, 2 numeric domain error,
3 oracle check failure (``--check``).
"""

from __future__ import annotations

import argparse
import sys

from .errors import (
    DomainError,
    ExprSyntaxError,
    NestingDepthError,
    NonFinite,
    RecursiveDefinition,
    UndefinedFunction,
    UndefinedVariable,
    UnknownFunction,
    ZeroPrimal,
)
from .evaluate import check, evaluate, report
from .oracle import FDConfig
from .parser import parse

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

_PARSE_ERRORS = (
    ExprSyntaxError,
    UndefinedFunction,
    UndefinedVariable,
    RecursiveDefinition,
    NestingDepthError,
    UnknownFunction,
)
_NUMERIC_ERRORS = (DomainError, ZeroPrimal, NonFinite)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nestad", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("eval", help="evaluate a program and its derivatives")
    ev.add_argument("source", help="program file, or - for stdin")
    ev.add_argument("--json", action="store_true", help="machine-readable output")
    ev.add_argument("--check", action="store_true", help="cross-check against the symbolic and FD oracles")
    ev.add_argument("--fd-step", type=float, default=None, metavar="H", help="fixed finite-difference step")
    ev.add_argument("--precision", type=int, default=17, metavar="DIGITS", help="significant digits in text output")
    return ap


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _read(args.source)
    except OSError as exc:
        print(f"nestad: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.precision < 1:
        print("nestad: --precision must be at least 1", file=sys.stderr)
        return EXIT_PARSE

    try:
        program = parse(text)
    except _PARSE_ERRORS as exc:
        print(f"nestad: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE

    try:
        result = evaluate(program)
        if args.check:
            cfg = FDConfig(step=args.fd_step) if args.fd_step is not None else FDConfig()
            result.check = check(program, result, cfg)
    except _NUMERIC_ERRORS as exc:
        print(f"nestad: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:  # FDConfig rejects a bad --fd-step
        print(f"nestad: {exc}", file=sys.stderr)
        return EXIT_PARSE

    sys.stdout.write(report(result, "json" if args.json else "text", args.precision))
    if result.check is not None and not result.check["passed"]:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
