"""Matrix-rank and linear-complexity tests on a :class:`BitSource`."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import f2math
from .bitlane import BitSource


class InvalidParams(ValueError):
    pass


class Verdict(enum.Enum):
    PASS = "Pass"
    SUSPECT = "Suspect"
    DECISIVE_LOW = "DecisiveLow"
    DECISIVE_HIGH = "DecisiveHigh"

    @property
    def decisive(self) -> bool:
        return self in (Verdict.DECISIVE_LOW, Verdict.DECISIVE_HIGH)

    @property
    def severity(self) -> int:
        return 2 if self.decisive else int(self is Verdict.SUSPECT)


@dataclass(frozen=True)
class Thresholds:
    decisive: float = 1e-10
    suspect: float = 1e-4

    def __post_init__(self):
        if not 0 < self.decisive <= self.suspect < 0.5:
            raise InvalidParams(f"need 0 < decisive <= suspect < 0.5, got {self}")


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class MatrixRankParams:
    L: int = 320
    N: int = 50
    s: int = 1

    name = "MatrixRank"

    def __post_init__(self):
        if self.L < 2:
            raise InvalidParams(f"L={self.L}: matrices must be at least 2x2")
        if self.N < 20:
            raise InvalidParams(f"N={self.N}: need at least 20 matrices")
        if not 1 <= self.s <= 32:
            raise InvalidParams(f"s={self.s} outside [1, 32]")
        if self.L % self.s:
            raise InvalidParams(f"L={self.L} not divisible by s={self.s}")

    @property
    def words_needed(self) -> int:
        return self.N * self.L * self.L // self.s


@dataclass(frozen=True)
class LinearCompParams:
    M: int = 5000
    N: int = 50
    s: int = 1

    name = "LinearComp"

    def __post_init__(self):
        if self.M < 100:
            raise InvalidParams(f"M={self.M}: blocks shorter than 100 bits")
        if self.N < 20:
            raise InvalidParams(f"N={self.N}: need at least 20 blocks")
        if not 1 <= self.s <= 32:
            raise InvalidParams(f"s={self.s} outside [1, 32]")

    @property
    def words_needed(self) -> int:
        return -(-self.N * self.M // self.s)


TestParams = MatrixRankParams | LinearCompParams
PARAM_TYPES = {cls.name: cls for cls in (MatrixRankParams, LinearCompParams)}


def make_params(test: str, **values) -> TestParams:
    for name, cls in PARAM_TYPES.items():
        if test.strip().lower() == name.lower():
            try:
                return cls(**values)
            except TypeError as exc:
                raise InvalidParams(str(exc)) from None
    raise InvalidParams(f"unknown test {test!r}")


@dataclass(frozen=True)
class TestResult:
    test: str
    params: dict
    statistic: float
    p_value: float
    log10_p: float
    log10_1mp: float
    verdict: Verdict
    counts: tuple = ()
    detail: dict = field(default_factory=dict)
    generator: str = ""
    lane: str = ""
    seed: int | None = None

    __test__ = False  # not a pytest class

    def with_context(self, generator: str, lane: str, seed: int) -> TestResult:
        return replace(self, generator=generator, lane=lane, seed=seed)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["verdict"] = self.verdict.value
        rec["counts"] = list(self.counts)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> TestResult:
        rec = dict(rec)
        rec["verdict"] = Verdict(rec["verdict"])
        rec["counts"] = tuple(rec.get("counts", ()))
        return cls(**rec)


def _tails(p: float, log10_p: float | None, log10_1mp: float | None):
    if log10_p is None:
        log10_p = math.log10(p) if p > 0 else -math.inf
    if log10_1mp is None:
        log10_1mp = math.log10(-math.expm1(math.log(p))) if 0 < p < 1 else (-math.inf if p >= 1 else 0.0)
    return log10_p, log10_1mp


def classify(
    p: float,
    log10_p: float | None = None,
    log10_1mp: float | None = None,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> Verdict:
    """Map a p-value (and optionally its log tails) to a verdict.

    Either tail counts: a p-value extremely close to 1 is as decisive as one
    extremely close to 0. The log tails, when supplied, are used in place of
    ``p`` so that values far below double precision still classify.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"p-value {p} outside [0, 1]")
    lo, hi = _tails(p, log10_p, log10_1mp)
    if lo < math.log10(thresholds.decisive):
        return Verdict.DECISIVE_LOW
    if hi < math.log10(thresholds.decisive):
        return Verdict.DECISIVE_HIGH
    if min(lo, hi) < math.log10(thresholds.suspect):
        return Verdict.SUSPECT
    return Verdict.PASS


def _chisq(counts: np.ndarray, probs: np.ndarray) -> float:
    expected = counts.sum() * probs
    return float(np.sum((counts - expected) ** 2 / expected))


def matrix_rank_test(
    src: BitSource, params: MatrixRankParams, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> TestResult:
    L, N, s = params.L, params.N, params.s
    bits = src.bits(params.words_needed, s).reshape(N, L, L)
    ranks = f2math.gf2_ranks(f2math.pack_rows(bits))
    counts = np.array(
        [np.sum(ranks <= L - 2), np.sum(ranks == L - 1), np.sum(ranks == L)], dtype=np.int64
    )
    probs = np.array(f2math.rank_category_probs(L))
    stat = _chisq(counts, probs)
    log10_p, log10_1mp = f2math.chisq_log10_tails(stat, 2)
    p = 10.0**log10_p
    return TestResult(
        test=params.name,
        params=asdict(params),
        statistic=stat,
        p_value=p,
        log10_p=log10_p,
        log10_1mp=log10_1mp,
        verdict=classify(p, log10_p, log10_1mp, thresholds),
        counts=tuple(int(c) for c in counts),
        detail={"min_rank": int(ranks.min()), "max_rank": int(ranks.max())},
    )


def saturation_tails(M: int, N: int, c_max: int) -> tuple[float, float]:
    """Log10 tails of P(max of N block complexities >= c_max).

    An abnormally low maximum pushes this probability toward 1.
    """
    log_cdf = f2math.complexity_log_cdf(M)
    log_below = N * log_cdf[c_max - 1] if c_max > 0 else -math.inf
    log10_1mp = log_below / f2math.LN10
    log10_p = f2math._log1mexp(log_below) / f2math.LN10
    return log10_p, log10_1mp


def linear_complexity_test(
    src: BitSource, params: LinearCompParams, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> TestResult:
    M, N, s = params.M, params.N, params.s
    bits = src.bits(params.words_needed, s)[: N * M].reshape(N, M)
    complexities = f2math.block_complexities(bits)
    counts = np.bincount(f2math.complexity_bucket(M, complexities), minlength=7)
    stat = _chisq(counts, f2math.complexity_bucket_probs(M))
    log10_p, log10_1mp = f2math.chisq_log10_tails(stat, 6)
    p = 10.0**log10_p
    verdict = classify(p, log10_p, log10_1mp, thresholds)

    c_max = int(complexities.max())
    sat_lo, sat_hi = saturation_tails(M, N, c_max)
    if c_max <= M / 2 - 10 * math.sqrt(M):
        sat_verdict = Verdict.DECISIVE_HIGH
    else:
        sat_verdict = classify(10.0**sat_lo, sat_lo, sat_hi, thresholds)
    if (sat_verdict.severity, -min(sat_lo, sat_hi)) > (verdict.severity, -min(log10_p, log10_1mp)):
        verdict = sat_verdict

    return TestResult(
        test=params.name,
        params=asdict(params),
        statistic=stat,
        p_value=p,
        log10_p=log10_p,
        log10_1mp=log10_1mp,
        verdict=verdict,
        counts=tuple(int(c) for c in counts),
        detail={
            "max_complexity": c_max,
            "min_complexity": int(complexities.min()),
            "saturation_log10_p": sat_lo,
            "saturation_log10_1mp": sat_hi,
        },
    )


def run_test(
    src: BitSource, params: TestParams, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> TestResult:
    if isinstance(params, MatrixRankParams):
        return matrix_rank_test(src, params, thresholds)
    return linear_complexity_test(src, params, thresholds)
