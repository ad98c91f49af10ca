"""Command-line front end: ``indyn {simulate, verify, plot, events}``.

Exit codes: 0 success, 1 parse/validation/usage error, 2 verification
failure, 3 numerical failure inside an engine.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .core import WorldLineSet
from .errors import NumericalError, ParseError, ValidationError
from .io import (
    ExportBundle,
    load_config,
    metadata_json,
    parse_trajectories_csv,
    trajectories_csv,
    events_jsonl,
)
from .pipeline import simulate, verify_run
from .plot import emit_plot

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="indyn", description="World lines of induced-dynamics particle models.")
    ap.add_argument("--version", action="version", version=f"indyn {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="write trajectories.csv, events.jsonl and metadata.json")
    s.add_argument("config")
    s.add_argument("--out", help="output directory (default: $INDYN_OUT, then the working directory)")

    v = sub.add_parser("verify", help="run the verification checks and write a JSON report")
    v.add_argument("config")
    v.add_argument("--trajectories", help="check this trajectory CSV instead of a fresh simulation")
    v.add_argument("--report", help="write the report here instead of stdout")
    v.add_argument("--eq10-epsilon", type=int, choices=(-1, 1),
                   help="sign label of the pair for the sinh-Gordon two-body relation")

    p = sub.add_parser("plot", help="write an SVG world-line plot")
    p.add_argument("config")
    p.add_argument("--svg", required=True)
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--title")

    e = sub.add_parser("events", help="print the creation/annihilation event table")
    e.add_argument("config")
    return ap


def _load(path: str):
    try:
        text = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return load_config(text)


def _out_dir(arg: str | None) -> Path:
    return Path(arg or os.environ.get("INDYN_OUT") or ".")


def cmd_simulate(args) -> int:
    config = _load(args.config)
    lines = simulate(config)
    bundle = ExportBundle(lines, config)
    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trajectories.csv").write_text(trajectories_csv(lines), newline="")
    (out / "events.jsonl").write_text(events_jsonl(lines), newline="")
    (out / "metadata.json").write_text(metadata_json(bundle), newline="")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _load(args.config)
    lines = simulate(config)
    if args.trajectories:
        try:
            text = Path(args.trajectories).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {args.trajectories}: {exc.strerror}") from None
        table = parse_trajectories_csv(text)
        lines = WorldLineSet(table.lines, lines.events, lines.metadata)
    report, failures = verify_run(config, lines, args.eq10_epsilon)
    doc = {"report": report.to_dict(), "failures": failures, "passed": not failures}
    text = json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_plot(args) -> int:
    config = _load(args.config)
    svg = emit_plot(simulate(config), width=args.width, height=args.height, title=args.title)
    Path(args.svg).write_text(svg)
    return EXIT_OK


def cmd_events(args) -> int:
    lines = simulate(_load(args.config))
    print(f"{'kind':<13}{'t_event':>24}{'bracket_width':>16}  line_ids")
    for ev in lines.events:
        ids = ",".join(str(i) for i in ev.line_ids)
        print(f"{ev.kind.value:<13}{ev.t_event:>24.17g}{ev.t_bracket_width:>16.3g}  {ids}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "plot": cmd_plot, "events": cmd_events}


def run_cli(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"indyn: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"indyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"indyn: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())
