"""``jxeskit`` command line: convert, validate, stats, generate, bench.

Human-readable messages go to stderr, data to stdout or files. Set
``JXESKIT_LOG`` (debug, info, warning, error) to change verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import bench, validator
from ._io import atomic_output
from .errors import (
    InvalidProfile,
    IoFailure,
    MalformedJson,
    MalformedXml,
    SchemaViolation,
    UnsupportedConstruct,
)
from .formats import detect_format, load_log, save_log
from .loggen import GenProfile, generate
from .model import log_statistics
from .reader import BackendKind

log = logging.getLogger("jxeskit")

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_WARNINGS = 0, 1, 2, 3
_PARSE_ERRORS = (MalformedJson, SchemaViolation, MalformedXml, UnsupportedConstruct)


def _fail(code: int, msg: str) -> int:
    print(f"jxeskit: error: {msg}", file=sys.stderr)
    return code


def _run_guarded(fn, args) -> int:
    try:
        return fn(args)
    except _PARSE_ERRORS as exc:
        return _fail(EXIT_INVALID, str(exc))
    except (IoFailure, OSError) as exc:
        return _fail(EXIT_IO, str(exc))
    except (InvalidProfile, ValueError) as exc:
        return _fail(EXIT_INVALID, str(exc))


def cmd_convert(args) -> int:
    src_fmt = detect_format(args.input, args.in_format)
    dst_fmt = detect_format(args.output, args.out_format)
    if not os.path.exists(args.input):
        return _fail(EXIT_IO, f"{args.input}: no such file")
    event_log, meta = load_log(args.input, src_fmt, args.backend, args.strict)
    save_log(event_log, args.output, dst_fmt, args.backend, meta, args.pretty)
    return EXIT_OK


def cmd_validate(args) -> int:
    if not os.path.exists(args.input):
        return _fail(EXIT_IO, f"{args.input}: no such file")
    diags = validator.validate_document(args.input)
    sys.stderr.write(validator.format_text(diags))
    if args.json_report:
        report = validator.format_json(diags)
        if args.json_report == "-":
            print(report)
        else:
            with atomic_output(args.json_report, compress=False) as fh:
                fh.write(report.encode())
    if validator.has_errors(diags):
        return EXIT_INVALID
    if args.strict and diags:
        return EXIT_WARNINGS
    return EXIT_OK


def cmd_stats(args) -> int:
    if not os.path.exists(args.input):
        return _fail(EXIT_IO, f"{args.input}: no such file")
    event_log, _ = load_log(args.input, args.in_format, args.backend)
    s = log_statistics(event_log)
    print(
        f"traces {s.trace_count}, events {s.event_count}, variants {s.variant_count}, "
        f"activities {s.distinct_activities}, max length {s.max_trace_length}"
    )
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        profile = GenProfile.from_json(args.profile)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_IO if isinstance(exc, OSError) else EXIT_INVALID, f"{args.profile}: {exc}")
    save_log(generate(profile), args.output, args.out_format, args.backend, pretty=args.pretty)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        suite = json.loads(Path(args.suite).read_text())
    except OSError as exc:
        return _fail(EXIT_IO, f"{args.suite}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        return _fail(EXIT_INVALID, f"{args.suite}: {exc}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cases = bench.cases_from_suite(suite, Path(args.suite).parent, args.runs)
    if not cases:
        return _fail(EXIT_INVALID, "the suite defines no cases")
    report = bench.run_bench(cases, measure_memory=suite.get("measure_memory", True))
    for r in report.results:
        if not r.ok:
            log.warning("case %s %s %s failed: %s", r.case.input_name, r.case.direction,
                        r.case.label, r.error)
    formats = ["csv", "md"] if args.report is None else [args.report]
    for fmt in formats:
        target = out_dir / f"report.{fmt}"
        with atomic_output(target, compress=False) as fh:
            fh.write(bench.render_tables(report, fmt))
    with atomic_output(out_dir / "report.json", compress=False) as fh:
        fh.write(report.to_json().encode())
    failed = sum(not r.ok for r in report.results)
    print(f"{len(report.results)} cases, {failed} failed; reports in {out_dir}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jxeskit", description="JXES/XES event log toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def backend_opt(p):
        p.add_argument("--backend", choices=[b.value for b in BackendKind], default="tree",
                       help="JSON parser/serializer strategy (default: tree)")

    fmts = ["xes", "xes-gz", "jxes", "jxes-gz"]

    p = sub.add_parser("convert", help="convert between XES and JXES")
    p.add_argument("input")
    p.add_argument("output")
    backend_opt(p)
    p.add_argument("--strict", action="store_true", help="reject unknown and duplicate JSON keys")
    p.add_argument("--in-format", choices=fmts)
    p.add_argument("--out-format", choices=fmts)
    p.add_argument("--pretty", action="store_true", help="indent JXES output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="check a JXES document")
    p.add_argument("input")
    p.add_argument("--strict", action="store_true", help="fail (exit 3) on warnings too")
    p.add_argument("--json-report", metavar="PATH", help="also write diagnostics as JSON ('-' for stdout)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="print log characteristics")
    p.add_argument("input")
    backend_opt(p)
    p.add_argument("--in-format", choices=fmts)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("generate", help="write a synthetic log from a JSON profile")
    p.add_argument("profile")
    p.add_argument("output")
    backend_opt(p)
    p.add_argument("--out-format", choices=fmts)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("suite")
    p.add_argument("out_dir")
    p.add_argument("--runs", type=int, help="override the runs per case")
    p.add_argument("--report", choices=["csv", "md"], help="table format (default: both)")
    p.set_defaults(func=cmd_bench)
    return parser


def _configure_logging():
    level = os.environ.get("JXESKIT_LOG", "warning").upper()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("jxeskit: %(levelname)s: %(message)s"))
    root = logging.getLogger("jxeskit")
    root.handlers[:] = [handler]
    root.setLevel(getattr(logging, level, logging.WARNING))
    root.propagate = False


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    if getattr(args, "runs", None) is not None and args.runs < 1:
        return _fail(EXIT_INVALID, "--runs must be >= 1")
    return _run_guarded(args.func, args)


if __name__ == "__main__":
    sys.exit(main())
