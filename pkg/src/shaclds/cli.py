"""Command line: ``shaclds validate | check-shapes | test``.

Exit codes: 0 conforms / clean, 1 violations found, 2 error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .engine import WellformednessError, validate
from .harness import ManifestError, run_manifest
from .namespaces import REPORT_PREFIXES
from .parsing import ParseError, load_dataset
from .report import conforms
from .serializer import serialize_graph
from .shapes_dataset import check_wellformed

EXIT_OK, EXIT_VIOLATIONS, EXIT_ERROR = 0, 1, 2

log = logging.getLogger("shaclds")


def _error(message: str) -> int:
    sys.stderr.write(f"error: {message}\n")
    return EXIT_ERROR


def cmd_validate(data: str, shapes: str, data_format: Optional[str] = None,
                 shapes_format: Optional[str] = None, output: Optional[str] = None,
                 output_format: str = "turtle", fail_fast: bool = False,
                 max_results: Optional[int] = None) -> int:
    try:
        data_ds = load_dataset(data, data_format)
        shapes_ds = load_dataset(shapes, shapes_format)
        report = validate(data_ds, shapes_ds, fail_fast=fail_fast, max_results=max_results)
    except OSError as exc:
        return _error(str(exc))
    except ParseError as exc:
        return _error(str(exc))
    except WellformednessError as exc:
        sys.stderr.write(f"error: {exc}\n")
        for v in exc.violations:
            sys.stderr.write(f"  {v}\n")
        return EXIT_ERROR
    except ValueError as exc:
        return _error(str(exc))
    text = serialize_graph(report, output_format, REPORT_PREFIXES)
    if output:
        try:
            Path(output).write_bytes(text)
        except OSError as exc:
            return _error(str(exc))
    else:
        sys.stdout.buffer.write(text)
        sys.stdout.flush()
    return EXIT_OK if conforms(report) else EXIT_VIOLATIONS


def cmd_check_shapes(shapes: str, shapes_format: Optional[str] = None,
                     data: Optional[str] = None, data_format: Optional[str] = None) -> int:
    try:
        shapes_ds = load_dataset(shapes, shapes_format)
        data_ds = load_dataset(data, data_format) if data else None
    except (OSError, ParseError) as exc:
        return _error(str(exc))
    violations = check_wellformed(shapes_ds, data_ds)
    for v in violations:
        sys.stdout.write(f"{v}\n")
    if violations:
        sys.stdout.write(f"{len(violations)} violation(s)\n")
        return EXIT_VIOLATIONS
    sys.stdout.write("shapes dataset is well-formed\n")
    return EXIT_OK


def cmd_test(manifest_dir: str) -> int:
    try:
        outcomes = run_manifest(Path(manifest_dir), sys.stdout)
    except ManifestError as exc:
        return _error(str(exc))
    return EXIT_OK if outcomes and all(o.passed for o in outcomes) else EXIT_VIOLATIONS


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shaclds", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a data dataset against a shapes dataset")
    v.add_argument("--data", required=True)
    v.add_argument("--shapes", required=True)
    v.add_argument("--data-format", choices=("trig", "nquads"))
    v.add_argument("--shapes-format", choices=("trig", "nquads"))
    v.add_argument("--output", help="write the report here instead of stdout")
    v.add_argument("--output-format", choices=("turtle", "trig"), default="turtle")
    v.add_argument("--fail-fast", action="store_true")
    v.add_argument("--max-results", type=_positive, metavar="N")

    c = sub.add_parser("check-shapes", help="well-formedness checks on a shapes dataset")
    c.add_argument("shapes")
    c.add_argument("--shapes-format", choices=("trig", "nquads"))
    c.add_argument("--data", help="also require plain target IRIs to name graphs of this dataset")
    c.add_argument("--data-format", choices=("trig", "nquads"))

    t = sub.add_parser("test", help="run a conformance corpus")
    t.add_argument("manifest_dir")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.command == "validate":
        return cmd_validate(args.data, args.shapes, args.data_format, args.shapes_format,
                            args.output, args.output_format, args.fail_fast, args.max_results)
    if args.command == "check-shapes":
        return cmd_check_shapes(args.shapes, args.shapes_format, args.data, args.data_format)
    return cmd_test(args.manifest_dir)


if __name__ == "__main__":
    sys.exit(main())
