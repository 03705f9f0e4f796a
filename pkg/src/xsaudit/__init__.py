"""Linearity audit for scrambled Xorshift generators.

Generators, 32-bit lane extraction, GF(2) matrix-rank and linear-complexity
tests, and multi-seed campaigns that flag systematic failures.
"""

__version__ = "0.1.0"

from .battery import (  # noqa: E402
    LinearCompParams,
    MatrixRankParams,
    TestResult,
    Thresholds,
    Verdict,
    classify,
    linear_complexity_test,
    matrix_rank_test,
    run_test,
)
from .bitlane import ALL_LANES, LOW32_REVERSED, GeneratorSource, LaneSpec, Selector, reverse32  # noqa: E402
from .prng import Generator, GeneratorKind, GeneratorState, seed_generator  # noqa: E402
from .campaign import CampaignConfig, run_campaign, summarize  # noqa: E402
