"""Command-line entry point: process, evaluate, stats, render."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .errors import TabAlignError
from .ingest import load_corrections, load_dataset, load_manifest, read_canonical, write_canonical
from .metrics import evaluate_corpus
from .parallel import JOBS_ENV, default_jobs
from .pipeline import PipelineOptions, Stage, load_options, run_pipeline
from .render import find_table, parse_layers, render_svg
from .stats import dataset_stats, format_stats_table

log = logging.getLogger("tabalign")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(TabAlignError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with configuration errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _key_value(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _jobs(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--jobs must be >= 1")
    return n


def cmd_process(args) -> int:
    manifest = load_manifest(args.manifest)
    try:
        stage = Stage.parse(args.stage)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mode = args.mode or ("icdar" if manifest.kind == "icdar" else "fintabnet")

    overrides = dict(args.set or [])
    for f in fields(PipelineOptions):
        value = getattr(args, f.name)
        if value is not None:
            overrides[f.name] = str(value)
    options = load_options(args.options, overrides)

    tables, failures = load_dataset(manifest, jobs=args.jobs)
    corrections = load_corrections(manifest)
    kept, report = run_pipeline(
        tables, stage, options, mode=mode, corrections=corrections, dataset=manifest.name, jobs=args.jobs
    )
    report.extra["ingest_failures"] = [
        {"source": f.source, "reason": f.reason, "detail": f.detail} for f in failures
    ]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_canonical(kept, out / f"{manifest.name}.{stage.label}.jsonl")
    _write(out / "report.json", report.to_json())
    _write(out / "report.txt", report.to_text())
    print(report.to_text(), end="")

    if len(failures) > args.max_failures:
        log.error("%d unreadable records exceed the allowed %d", len(failures), args.max_failures)
        return EXIT_DATA
    return EXIT_OK


def cmd_evaluate(args) -> int:
    gt = read_canonical(args.gt)
    pred = read_canonical(args.pred)
    report = evaluate_corpus(gt, pred, jobs=args.jobs)
    if args.out:
        out = Path(args.out)
        _write(out / "metrics.json", report.to_json())
        _write(out / "metrics.csv", report.to_csv())
        _write(out / "metrics.txt", report.to_text())
    print(report.to_text(), end="")
    return EXIT_OK


def cmd_stats(args) -> int:
    named = []
    for path in args.inputs:
        named.append((Path(path).name, dataset_stats(read_canonical(path))))
    text = format_stats_table(named)
    if args.out:
        out = Path(args.out)
        payload = {name: s.to_dict() for name, s in named}
        _write(out / "stats.json", json.dumps(payload, indent=2) + "\n")
        _write(out / "stats.txt", text)
    print(text, end="")
    return EXIT_OK


def cmd_render(args) -> int:
    layers = parse_layers(args.layers)
    table = find_table(read_canonical(args.inputs), args.table)
    svg = render_svg(table, layers)
    if args.out:
        _write(Path(args.out), svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tabalign", description="Align, evaluate and summarize table structure annotations.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    jobs_help = f"worker processes (default from ${JOBS_ENV}, else 1)"

    p = sub.add_parser("process", help="run the alignment pipeline up to a stage")
    p.add_argument("--manifest", required=True)
    p.add_argument("--stage", required=True, help="a1..a6 (icdar: a1..a3)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mode", choices=("fintabnet", "icdar"), help="defaults to the manifest kind")
    p.add_argument("--options", help="key = value thresholds file")
    p.add_argument("--set", action="append", type=_key_value, metavar="KEY=VALUE", help="override one threshold")
    for f in fields(PipelineOptions):
        p.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, default=None, help=argparse.SUPPRESS)
    p.add_argument("--jobs", type=_jobs, default=None, help=jobs_help)
    p.add_argument("--max-failures", type=int, default=0, help="unreadable records tolerated before exit 2")
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("evaluate", help="score predictions against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", help="directory for metrics.json/.csv/.txt")
    p.add_argument("--jobs", type=_jobs, default=None, help=jobs_help)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="diversity and complexity statistics")
    p.add_argument("--in", dest="inputs", required=True, nargs="+")
    p.add_argument("--out", help="directory for stats.json/.txt")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", help="SVG overlay of one table")
    p.add_argument("--in", dest="inputs", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--layers", default="rows,columns")
    p.add_argument("--out", help="SVG path (default stdout)")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "jobs", 1) is None:
        args.jobs = default_jobs()
    try:
        return args.func(args)
    except (TabAlignError, OSError) as exc:
        print(f"tabalign: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
