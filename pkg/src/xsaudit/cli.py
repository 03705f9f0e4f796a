"""Command-line interface: ``xsaudit {list,stream,test,campaign,report}``.

Exit codes: 0 success (test verdict Pass/Suspect), 2 usage or config error,
3 decisive test failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .battery import (
    DEFAULT_THRESHOLDS,
    PARAM_TYPES,
    InvalidParams,
    Thresholds,
    make_params,
    run_test,
)
from .bitlane import ALL_LANES, GeneratorSource, LaneSpec
from .campaign import (
    DEFAULT_TESTS,
    FULL_SEEDS,
    CampaignConfig,
    desk_config,
    load_config,
    parse_seeds,
    run_campaign,
    summarize,
    summarize_results,
    scrambled_config,
)
from .formats import OutputFormat, jsonl_line, parse_jsonl, render_results, render_summary
from .prng import AllZeroState, GeneratorKind, seed_generator

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DECISIVE = 3
EXIT_IO = 4

STREAM_CHUNK = 1 << 16


class UsageError(Exception):
    pass


def _kind(name: str) -> GeneratorKind:
    try:
        return GeneratorKind.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _lane(name: str) -> LaneSpec:
    try:
        return LaneSpec.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _csv_list(conv):
    def parse(text: str):
        return [conv(part) for part in text.split(",") if part.strip()]

    return parse


def _lanes(text: str):
    if text.strip().lower() == "all":
        return list(ALL_LANES)
    return _csv_list(_lane)(text)


def _thresholds(args) -> Thresholds:
    try:
        return Thresholds(args.threshold_decisive, args.threshold_suspect)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from None


def _add_common(p, *, lane_default=None):
    p.add_argument("--gen", type=_kind, required=lane_default is not None, help="generator name")
    p.add_argument("--seed", type=_seed, default=1)
    p.add_argument(
        "--lane", type=_lane, default=lane_default, help="interleave|low32|high32, suffix -rev to reverse"
    )
    p.add_argument("--reverse", action="store_true", help="reverse the bit order of the lane words")


def _add_thresholds(p):
    p.add_argument("--threshold-decisive", type=float, default=DEFAULT_THRESHOLDS.decisive)
    p.add_argument("--threshold-suspect", type=float, default=DEFAULT_THRESHOLDS.suspect)


def _add_format(p, default="human"):
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xsaudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list generators, lanes and tests")

    p = sub.add_parser("stream", help="write raw lane words (4-byte little-endian) to stdout")
    _add_common(p, lane_default="low32-rev")
    p.add_argument("--words", type=int, default=None, help="number of words (default: unbounded)")

    p = sub.add_parser("test", help="run one statistical test")
    _add_common(p, lane_default="low32-rev")
    p.add_argument("--test", required=True, type=str.lower, choices=[n.lower() for n in PARAM_TYPES])
    for name in ("L", "M", "N", "s"):
        p.add_argument(f"--{name}", type=int, dest=f"param_{name}")
    _add_thresholds(p)
    _add_format(p)

    p = sub.add_parser("campaign", help="multi-seed campaign with systematic-failure summary")
    p.add_argument("--config", type=Path, help="campaign config file")
    p.add_argument("--preset", choices=["desk", "scrambled", "full"], default="scrambled")
    p.add_argument("--gen", type=_csv_list(_kind), help="comma-separated generators")
    p.add_argument("--lane", type=_lanes, help="comma-separated lanes, or 'all'")
    p.add_argument("--test", type=_csv_list(str.lower), help="comma-separated tests")
    p.add_argument("--seeds", help="seed range '1..10' or list '1,5,9'")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=Path, help="output directory")
    _add_thresholds(p)
    _add_format(p, default="markdown")

    p = sub.add_parser("report", help="render the summary of a campaign output directory")
    p.add_argument("dir", type=Path)
    _add_format(p, default="markdown")
    return parser


# -- commands ---------------------------------------------------------------------


def _source(args) -> GeneratorSource:
    lane = LaneSpec(args.lane.selector, args.lane.reversed or args.reverse)
    try:
        return GeneratorSource(seed_generator(args.gen, args.seed), lane)
    except AllZeroState as exc:
        raise UsageError(str(exc)) from None


def cmd_list(args, out) -> int:
    out.write("generators:\n")
    for kind in GeneratorKind:
        out.write(f"  {kind.value:<20} {kind.label} ({kind.state_bits}-bit state)\n")
    out.write("lanes:\n")
    for lane in ALL_LANES:
        out.write(f"  {lane.name}\n")
    out.write("tests:\n")
    for params in DEFAULT_TESTS:
        values = " ".join(f"{k}={v}" for k, v in vars(params).items())
        out.write(f"  {params.name.lower():<20} defaults {values}\n")
    return EXIT_OK


def cmd_stream(args, out) -> int:
    if args.words is not None and args.words < 0:
        raise UsageError("--words must be >= 0")
    src = _source(args)
    raw = out.buffer if hasattr(out, "buffer") else out
    remaining = args.words
    try:
        while remaining is None or remaining > 0:
            n = STREAM_CHUNK if remaining is None else min(STREAM_CHUNK, remaining)
            raw.write(src.words(n).astype("<u4").tobytes())
            if remaining is not None:
                remaining -= n
        raw.flush()
    except BrokenPipeError:
        # consumer closed the pipe; stop quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
    return EXIT_OK


def cmd_test(args, out) -> int:
    values = {
        name: getattr(args, f"param_{name}")
        for name in ("L", "M", "N", "s")
        if getattr(args, f"param_{name}") is not None
    }
    try:
        params = make_params(args.test, **values)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from None
    thresholds = _thresholds(args)
    src = _source(args)
    result = run_test(src, params, thresholds).with_context(args.gen.value, src.lane.name, args.seed)
    out.write(render_results([result], OutputFormat(args.format)))
    return EXIT_DECISIVE if result.verdict.decisive else EXIT_OK


def _campaign_config(args) -> CampaignConfig:
    try:
        if args.config is not None:
            config = load_config(args.config)
        elif args.preset == "full":
            config = scrambled_config(FULL_SEEDS)
        elif args.preset == "desk":
            config = desk_config()
        else:
            config = scrambled_config()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    try:
        overrides = {}
        if args.gen is not None:
            overrides["generators"] = tuple(args.gen)
        if args.lane is not None:
            overrides["lanes"] = tuple(args.lane)
        if args.test is not None:
            overrides["tests"] = tuple(make_params(t) for t in args.test)
        if args.seeds is not None:
            overrides["seeds"] = parse_seeds(args.seeds)
        if args.workers is not None:
            overrides["workers"] = args.workers
        if (args.threshold_decisive, args.threshold_suspect) != (
            DEFAULT_THRESHOLDS.decisive,
            DEFAULT_THRESHOLDS.suspect,
        ):
            overrides["thresholds"] = _thresholds(args)
        fields = {
            "generators": config.generators,
            "lanes": config.lanes,
            "tests": config.tests,
            "seeds": config.seeds,
            "workers": config.workers,
            "thresholds": config.thresholds,
        }
        fields.update(overrides)
        return CampaignConfig(**fields)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from None


_EXT = {
    OutputFormat.HUMAN: "txt",
    OutputFormat.MARKDOWN: "md",
    OutputFormat.CSV: "csv",
    OutputFormat.JSONL: "jsonl",
}


def cell_filename(generator: str, lane: str, test: str) -> str:
    return f"{generator}__{lane}__{test}.jsonl"


def write_campaign(report, out_dir: Path, fmt: OutputFormat) -> None:
    """Write report.json, one JSONL file per cell, and the rendered summary."""
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report.summary_record(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    for (kind, lane, test), results in report.cells.items():
        text = "".join(jsonl_line(r) for r in results)
        (cells_dir / cell_filename(kind.value, lane.name, test)).write_text(text, encoding="utf-8")
    (out_dir / f"summary.{_EXT[fmt]}").write_text(render_summary(summarize(report), fmt), encoding="utf-8")


def cmd_campaign(args, out) -> int:
    config = _campaign_config(args)
    fmt = OutputFormat(args.format)
    report = run_campaign(config)
    logging.getLogger(__name__).info("elapsed %.1f s", report.metadata["elapsed_s"])
    if args.out is not None:
        try:
            write_campaign(report, args.out, fmt)
        except OSError as exc:
            print(f"xsaudit: cannot write output: {exc}", file=sys.stderr)
            return EXIT_IO
    out.write(render_summary(summarize(report), fmt))
    return EXIT_OK


def load_campaign_dir(path: Path):
    """Results, generator/lane order and errored cells from a campaign output directory."""
    header = json.loads((path / "report.json").read_text(encoding="utf-8"))
    config = header["config"]
    results = []
    for gen in config["generators"]:
        for lane in config["lanes"]:
            for test in config["tests"]:
                cell = path / "cells" / cell_filename(gen, lane, test["test"])
                if cell.exists():
                    results += parse_jsonl(cell.read_text(encoding="utf-8"))
    errored = {(e["generator"], e["lane"], e["test"]) for e in header.get("errors", [])}
    return results, config["generators"], config["lanes"], errored


def cmd_report(args, out) -> int:
    try:
        results, generators, lanes, errored = load_campaign_dir(args.dir)
    except (OSError, ValueError, KeyError) as exc:
        print(f"xsaudit: cannot read campaign directory: {exc}", file=sys.stderr)
        return EXIT_IO
    rows = summarize_results(results, generators, lanes, errored)
    out.write(render_summary(rows, OutputFormat(args.format)))
    return EXIT_OK


COMMANDS = {
    "list": cmd_list,
    "stream": cmd_stream,
    "test": cmd_test,
    "campaign": cmd_campaign,
    "report": cmd_report,
}


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    out = out if out is not None else sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"xsaudit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
