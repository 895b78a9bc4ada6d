"""Command-line entry point: ``freeloop MODE [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from . import necklaces
from .manifold import ParseError, ValidationError, load_manifold
from .report import (ResourceGuardError, betti_csv, build_report, default_max_weight, dumps,
                     hpt_report, necklace_report)
from .scalars import FieldError, FieldSpec

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_INVARIANT, EXIT_RESOURCE = 0, 2, 3, 4, 5


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freeloop",
                                description="Exact string topology of highly connected manifolds.")
    p.add_argument("mode", choices=["compute", "crosscheck", "necklace", "hpt-demo"])
    p.add_argument("--input", help="manifold JSON file (compute, crosscheck)")
    p.add_argument("--max-weight", type=int, help="largest U-weight (default 6 over Q, 8 over F_p)")
    p.add_argument("--field", help="q or fp:P; overrides the field in the input file")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write the Betti table as CSV")
    p.add_argument("--experimental-delta", action="store_true",
                   help="compute Delta over F_p as an unasserted probe")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for weight slices")
    p.add_argument("--no-timing", action="store_true", help="omit the timing section from the report")
    p.add_argument("--m", type=int, help="alphabet size (necklace mode)")
    p.add_argument("--w", type=int, help="word length (necklace mode)")
    p.add_argument("--n", type=int, default=2, help="degree parameter; only its parity matters (necklace mode)")
    p.add_argument("--oracle", action="store_true", help="also count orbits by enumeration (necklace mode)")
    p.add_argument("--seed", type=int, default=0, help="random seed (hpt-demo mode)")
    p.add_argument("--count", type=int, default=100, help="random instances (hpt-demo mode)")
    return p


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, msg: str) -> int:
    print(f"freeloop: {msg}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        return _fail(EXIT_PARSE, "--jobs must be at least 1")

    if args.mode == "necklace":
        if args.m is None or args.w is None:
            return _fail(EXIT_PARSE, "necklace mode needs --m and --w")
        try:
            rep = necklace_report(args.m, args.w, args.n)
            if args.oracle:
                rep["oracle"] = necklaces.betti_oracle(args.m, args.w, args.n)
        except necklaces.ResourceGuardError as exc:
            return _fail(EXIT_RESOURCE, str(exc))
        except necklaces.NecklaceError as exc:
            return _fail(EXIT_VALIDATION, str(exc))
        print(rep["betti"])
        if args.out:
            _emit(dumps(rep), args.out)
        if args.oracle and rep["oracle"] != rep["betti"]:
            return _fail(EXIT_INVARIANT, f"oracle {rep['oracle']} != formula {rep['betti']}")
        return EXIT_OK

    if args.mode == "hpt-demo":
        rep = hpt_report(args.seed, args.count)
        _emit(dumps(rep), args.out)
        if rep["status"] != "pass":
            return _fail(EXIT_INVARIANT, "perturbation lemma check failed")
        return EXIT_OK

    if not args.input:
        return _fail(EXIT_PARSE, f"{args.mode} mode needs --input")
    try:
        field = FieldSpec.parse(args.field) if args.field else None
    except FieldError as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        m = load_manifold(args.input, field)
    except (OSError, ParseError, json.JSONDecodeError, FieldError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    except ValidationError as exc:
        return _fail(EXIT_VALIDATION, "; ".join(exc.errors))
    max_weight = args.max_weight if args.max_weight is not None else default_max_weight(m.field)
    if max_weight < 0:
        return _fail(EXIT_PARSE, "--max-weight must be nonnegative")
    try:
        rep, _ = build_report(m, max_weight, args.mode, args.experimental_delta, args.jobs)
    except ResourceGuardError as exc:
        return _fail(EXIT_RESOURCE, str(exc))
    _emit(dumps(rep, with_timing=not args.no_timing), args.out)
    if args.csv:
        _emit(betti_csv(rep), args.csv)
    if rep["status"] != "pass":
        return _fail(EXIT_INVARIANT, f"check failed: {rep['first_failure']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
