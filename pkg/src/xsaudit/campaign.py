"""Multi-seed campaigns over (generator, lane, test) cells.

A cell fails *systematically* when every seed yields a decisive verdict.
Work items are independent, so they may run in a process pool; results are
always reassembled in config order, making reports independent of the
worker count.
"""

from __future__ import annotations

import configparser
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .battery import (
    DEFAULT_THRESHOLDS,
    InvalidParams,
    LinearCompParams,
    MatrixRankParams,
    TestParams,
    TestResult,
    Thresholds,
    make_params,
    run_test,
)
from .bitlane import ALL_LANES, LOW32_REVERSED, GeneratorSource, LaneSpec
from .formats import jsonl_line
from .prng import SCRAMBLED_KINDS, AllZeroState, GeneratorKind, seed_generator

log = logging.getLogger(__name__)

DESK_SEEDS = 10
FULL_SEEDS = 100
DEFAULT_TESTS = (LinearCompParams(), MatrixRankParams())


@dataclass(frozen=True)
class CampaignConfig:
    generators: tuple[GeneratorKind, ...]
    lanes: tuple[LaneSpec, ...]
    tests: tuple[TestParams, ...]
    seeds: tuple[int, ...] = tuple(range(1, DESK_SEEDS + 1))
    workers: int = 1
    thresholds: Thresholds = DEFAULT_THRESHOLDS

    def __post_init__(self):
        for name in ("generators", "lanes", "tests", "seeds"):
            if not getattr(self, name):
                raise InvalidParams(f"campaign needs at least one entry in {name}")
        if len(set(self.seeds)) != len(self.seeds):
            raise InvalidParams("campaign seeds must be distinct")
        if any(not 0 <= s < 1 << 64 for s in self.seeds):
            raise InvalidParams("seeds must be unsigned 64-bit integers")
        if len({t.name for t in self.tests}) != len(self.tests):
            raise InvalidParams("at most one parameterisation per test kind")
        if self.workers < 1:
            raise InvalidParams("workers must be >= 1")

    def echo(self) -> dict:
        """Config as plain data. The worker count is left out on purpose: it must not affect output."""
        return {
            "generators": [g.value for g in self.generators],
            "lanes": [lane.name for lane in self.lanes],
            "tests": [{"test": t.name, **asdict(t)} for t in self.tests],
            "seeds": list(self.seeds),
            "thresholds": asdict(self.thresholds),
        }


def desk_config(n_seeds: int = DESK_SEEDS, workers: int = 1) -> CampaignConfig:
    """Every generator on every lane with both tests."""
    return CampaignConfig(
        generators=tuple(GeneratorKind),
        lanes=ALL_LANES,
        tests=DEFAULT_TESTS,
        seeds=tuple(range(1, n_seeds + 1)),
        workers=workers,
    )


def scrambled_config(n_seeds: int = DESK_SEEDS, workers: int = 1) -> CampaignConfig:
    """Scrambled generators plus the SplitMix64 control on the reversed low lane."""
    return CampaignConfig(
        generators=SCRAMBLED_KINDS + (GeneratorKind.SPLITMIX64,),
        lanes=(LOW32_REVERSED,),
        tests=DEFAULT_TESTS,
        seeds=tuple(range(1, n_seeds + 1)),
        workers=workers,
    )


PRESETS = {"desk": desk_config, "scrambled": scrambled_config}

CellKey = tuple[GeneratorKind, LaneSpec, str]


@dataclass
class CampaignReport:
    config: CampaignConfig
    cells: dict[CellKey, list[TestResult]]
    errors: dict[tuple[CellKey, int], str] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def systematic(self) -> dict[CellKey, bool]:
        out = {}
        for key, results in self.cells.items():
            failed_seed = any(k == key for k, _ in self.errors)
            out[key] = (
                not failed_seed
                and len(results) == len(self.config.seeds)
                and all(r.verdict.decisive for r in results)
            )
        return out

    def results(self):
        for results in self.cells.values():
            yield from results

    def to_jsonl(self) -> str:
        return "".join(jsonl_line(r) for r in self.results())

    def summary_record(self) -> dict:
        """Deterministic report header: config echo, version, systematic flags and errors."""
        return {
            "version": __version__,
            "config": self.config.echo(),
            "systematic": [
                {"generator": g.value, "lane": lane.name, "test": t, "systematic": flag}
                for (g, lane, t), flag in self.systematic.items()
            ],
            "errors": [
                {"generator": g.value, "lane": lane.name, "test": t, "seed": seed, "error": msg}
                for ((g, lane, t), seed), msg in self.errors.items()
            ],
        }

    def serialize(self) -> str:
        return json.dumps(self.summary_record(), sort_keys=True) + "\n" + self.to_jsonl()


def _run_one(job) -> tuple[TestResult | None, str | None]:
    kind, lane, params, seed, thresholds = job
    try:
        state = seed_generator(kind, seed)
    except AllZeroState as exc:
        return None, f"AllZeroState: {exc}"
    result = run_test(GeneratorSource(state, lane), params, thresholds)
    return result.with_context(kind.value, lane.name, seed), None


def run_campaign(config: CampaignConfig) -> CampaignReport:
    jobs = [
        (kind, lane, params, seed, config.thresholds)
        for kind in config.generators
        for lane in config.lanes
        for params in config.tests
        for seed in config.seeds
    ]
    log.info("campaign: %d test runs on %d worker(s)", len(jobs), config.workers)
    start = time.perf_counter()
    if config.workers == 1:
        outcomes = list(map(_run_one, jobs))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))

    cells: dict[CellKey, list[TestResult]] = {}
    errors = {}
    for (kind, lane, params, seed, _), (result, err) in zip(jobs, outcomes):
        key = (kind, lane, params.name)
        cells.setdefault(key, [])
        if err is not None:
            errors[(key, seed)] = err
        else:
            cells[key].append(result)
    elapsed = time.perf_counter() - start
    log.info("campaign finished in %.1f s", elapsed)
    return CampaignReport(
        config,
        cells,
        errors,
        metadata={"version": __version__, "config": config.echo(), "elapsed_s": elapsed},
    )


@dataclass(frozen=True)
class SummaryRow:
    generator: str
    lane: str
    failed: tuple[str, ...]


def summarize(report: CampaignReport) -> list[SummaryRow]:
    """Systematically failed tests per (generator, lane), in config order."""
    flags = report.systematic
    rows = []
    for kind in report.config.generators:
        for lane in report.config.lanes:
            failed = tuple(
                t.name for t in report.config.tests if flags.get((kind, lane, t.name), False)
            )
            rows.append(SummaryRow(kind.label, lane.name, failed))
    return rows


def summarize_results(results, generators=None, lanes=None, errored=()) -> list[SummaryRow]:
    """Summary rows rebuilt from contextualised results (e.g. read back from disk).

    Generator, lane and test order follow first appearance in ``results``
    unless explicit generator/lane orders are given. Cells listed in
    ``errored`` (generator, lane, test) never count as systematic.
    """
    errored = set(errored)
    cells: dict[tuple[str, str, str], list[bool]] = {}
    tests: list[str] = []
    for r in results:
        cells.setdefault((r.generator, r.lane, r.test), []).append(r.verdict.decisive)
        if r.test not in tests:
            tests.append(r.test)
    generators = generators or list(dict.fromkeys(g for g, _, _ in cells))
    lanes = lanes or list(dict.fromkeys(lane for _, lane, _ in cells))
    rows = []
    for g in generators:
        for lane in lanes:
            failed = tuple(
                t
                for t in tests
                if (g, lane, t) not in errored and all(cells.get((g, lane, t), [False]))
            )
            rows.append(SummaryRow(GeneratorKind.parse(g).label, lane, failed))
    return rows


# -- config files ---------------------------------------------------------------


def parse_seeds(text: str) -> tuple[int, ...]:
    """Seeds from an inclusive range '1..10' or a list '1, 4, 9'."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x, 0) for x in text.split(".."))
            return tuple(range(lo, hi + 1))
        return tuple(int(p, 0) for p in text.replace(",", " ").split())
    except ValueError:
        raise InvalidParams(f"bad seed list {text!r}") from None


def parse_param_string(text: str) -> dict:
    values = {}
    for item in text.replace(",", " ").replace(";", " ").split():
        key, sep, val = item.partition("=")
        if not sep:
            raise InvalidParams(f"bad parameter {item!r}, expected KEY=VALUE")
        values[key.strip()] = int(val)
    return values


def load_config(path) -> CampaignConfig:
    """Read a campaign config file.

    Format (INI-style sections, ``#`` comments)::

        [generators]
        xorshift128plus
        xoroshiro128plus

        [lanes]
        low32-rev
        interleave

        [tests]
        linearcomp = M=5000 N=50 s=1
        matrixrank = L=320 N=50 s=1

        [seeds]
        range = 1..10        # or: list = 1, 7, 42

        [run]
        workers = 1
        threshold-decisive = 1e-10
        threshold-suspect = 1e-4
    """
    cp = configparser.ConfigParser(allow_no_value=True, inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise InvalidParams(f"{path}: {exc}") from None
    return config_from_parser(cp)


def config_from_parser(cp: configparser.ConfigParser) -> CampaignConfig:
    try:
        generators = tuple(GeneratorKind.parse(k) for k in _section_keys(cp, "generators"))
        lanes = tuple(LaneSpec.parse(k) for k in _section_keys(cp, "lanes"))
    except ValueError as exc:
        raise InvalidParams(str(exc)) from None
    tests = []
    if cp.has_section("tests"):
        for key, val in cp.items("tests"):
            tests.append(make_params(key.split(".")[0], **parse_param_string(val or "")))
    seeds = tuple(range(1, DESK_SEEDS + 1))
    if cp.has_section("seeds"):
        sec = cp["seeds"]
        if "list" in sec:
            seeds = parse_seeds(sec["list"])
        elif "range" in sec:
            seeds = parse_seeds(sec["range"])
        elif "count" in sec:
            seeds = parse_seeds(f"1..{sec['count']}")
    run = cp["run"] if cp.has_section("run") else {}
    try:
        thresholds = Thresholds(
            decisive=float(run.get("threshold-decisive", DEFAULT_THRESHOLDS.decisive)),
            suspect=float(run.get("threshold-suspect", DEFAULT_THRESHOLDS.suspect)),
        )
        workers = int(run.get("workers", 1))
    except ValueError as exc:
        raise InvalidParams(str(exc)) from None
    return CampaignConfig(generators, lanes, tuple(tests), seeds, workers, thresholds)


def _section_keys(cp, name):
    if not cp.has_section(name):
        return []
    return [key for key, _ in cp.items(name)]
