"""Command-line front end (`nash-lab`)."""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .corpus import format_table, run_example_suite
from .errors import NashLabError
from .grassmannian import Subspace, delta
from .regularity import analyze
from .report import analysis_report, dumps, suite_report
from .sampler import ScaleLadder
from .variety import VarietySpec

EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS = 0, 1, 2


class InputError(Exception):
    """Bad user input; the message already carries file/line context."""


def _key_line(text: str, key: str) -> int | None:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return None if m is None else text.count("\n", 0, m.start()) + 1


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return text, json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def load_spec(path: str) -> VarietySpec:
    text, doc = _load_json(path)
    try:
        return VarietySpec.from_document(doc)
    except NashLabError as exc:
        msg = str(exc)
        key = "graphs" if msg.startswith("graphs") else "equation" if msg.startswith("equation") else "kind"
        if key == "equation" and '"equation"' not in text:
            key = "inequality"
        line = _key_line(text, key)
        where = f"{path}:{line}" if line else path
        raise InputError(f"{where}: {msg}") from None


def parse_point(text: str, spec: VarietySpec):
    try:
        point = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--point: expected comma-separated numbers, got {text!r}") from None
    try:
        return spec.check_point(point)
    except NashLabError as exc:
        raise InputError(f"--point: {exc}") from None


def run_analyze(args) -> int:
    spec = load_spec(args.input)
    base = parse_point(args.point, spec)
    if args.scales < 6:
        raise InputError("--scales: need at least 6 ladder rungs")
    ladder = ScaleLadder.default(count=args.scales)
    analysis = analyze(spec, base, ladder, seed=args.seed)
    report = analysis_report(analysis)
    Path(args.report).write_text(dumps(report), encoding="utf-8")
    verdict = analysis.verdict
    print(f"verdict: {verdict.classification}")
    for note in verdict.notes:
        print(f"  {note}")
    if args.plot:
        from .svg import emit_plot

        try:
            emit_plot(json.loads(dumps(report)), args.plot)
        except ValueError as exc:
            print(f"plot skipped: {exc}", file=sys.stderr)
    failed = any(tag == "error" for tag, _, _ in verdict.evidence)
    return EXIT_ANALYSIS if failed else EXIT_OK


def run_examples(args) -> int:
    only = [s.strip() for s in args.only.split(",") if s.strip()] if args.only else None
    try:
        rows = run_example_suite(only, seed=args.seed)
    except KeyError as exc:
        raise InputError(f"--only: {exc.args[0]}") from None
    print(format_table(rows))
    if args.report:
        Path(args.report).write_text(dumps(suite_report(rows, args.seed)), encoding="utf-8")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_ANALYSIS


def _load_frame(path: str) -> Subspace:
    _, doc = _load_json(path)
    rows = doc.get("frame") if isinstance(doc, dict) else doc
    try:
        return Subspace.from_json(rows)
    except (NashLabError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: not a usable frame ({exc})") from None


def run_gr_dist(args) -> int:
    a, b = _load_frame(args.a), _load_frame(args.b)
    if (a.d, a.n) != (b.d, b.n):
        raise InputError(f"frames live in different Grassmannians: Gr({a.d},{a.n}) vs Gr({b.d},{b.n})")
    print(repr(delta(a, b)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nash-lab", description="Numerical study of Nash blowups of curve singularities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyse one base point of a variety")
    p.add_argument("--input", required=True, help="variety spec (JSON)")
    p.add_argument("--point", required=True, help="base point as comma-separated coordinates")
    p.add_argument("--scales", type=int, default=12, help="number of dyadic ladder rungs starting at 0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True, help="output JSON report")
    p.add_argument("--plot", help="optional SVG plot")
    p.set_defaults(func=run_analyze)

    p = sub.add_parser("examples", help="run the built-in example suite")
    p.add_argument("--only", help="comma-separated example ids")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="optional JSON report of the table")
    p.set_defaults(func=run_examples)

    p = sub.add_parser("gr-dist", help="Grassmannian distance between two frames")
    p.add_argument("--a", required=True, help="frame JSON (list of row vectors, or {\"frame\": [...]})")
    p.add_argument("--b", required=True)
    p.set_defaults(func=run_gr_dist)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
