"""Acceptance gate: one test per criterion, each timed against its budget.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints a
PASS/FAIL line per criterion.
"""

import itertools

import numpy as np
import pytest
from scipy import stats

from conftest import criterion
from oracles.gf2 import minimal_lfsr_length, naive_rank
from xsaudit import campaign as cm
from xsaudit.battery import LinearCompParams, MatrixRankParams, Verdict, run_test
from xsaudit.bitlane import ALL_LANES, LOW32_REVERSED, GeneratorSource, LaneSpec, Selector, reverse32, reverse32_array
from xsaudit.f2math import (
    PUBLISHED_BUCKET_PROBS,
    BitMatrix,
    berlekamp_massey,
    complexity_bucket_probs,
    complexity_pmf,
    gf2_rank,
    rank_probability,
)
from xsaudit.prng import SCRAMBLED_KINDS, GeneratorKind

K = GeneratorKind
SEEDS = tuple(range(1, 11))
WIDE_128 = (K.XORSHIFT128PLUS, K.XORSHIFT128PLUS_V8, K.XOROSHIRO128PLUS)
WIDE_1024 = (K.XORSHIFT1024STAR, K.XORSHIFT1024PLUS)


def test_criterion_1_kernel_oracles():
    with criterion(1, "Berlekamp-Massey and GF(2) rank match exhaustive/naive oracles", budget=10):
        cases = 0
        for n in range(1, 11):
            for seq in itertools.product((0, 1), repeat=n):
                assert berlekamp_massey(np.array(seq, dtype=np.uint8)) == minimal_lfsr_length(seq), seq
                cases += 1
        assert cases == 2046
        rng = np.random.default_rng(1)
        for _ in range(500):
            L = int(rng.integers(1, 65))
            # low-density matrices make rank deficiency common
            bits = (rng.random((L, L)) < rng.uniform(0.05, 0.5)).astype(np.uint8)
            assert gf2_rank(BitMatrix.from_bits(bits)) == naive_rank(bits)


def test_criterion_2_distributions():
    with criterion(2, "rank/complexity distributions sum to 1 and match enumeration and published buckets", budget=30):
        for L in [*range(1, 65), 320]:
            assert abs(sum(rank_probability(L, r) for r in range(L + 1)) - 1.0) < 1e-12, L
        for M in range(1, 17):
            hist = np.zeros(M + 1)
            for seq in itertools.product((0, 1), repeat=M):
                hist[berlekamp_massey(np.array(seq, dtype=np.uint8))] += 1
            expected = np.array([complexity_pmf(M, c) for c in range(M + 1)])
            assert np.array_equal(hist, expected * 2**M), M
        probs = complexity_bucket_probs(500)
        assert np.max(np.abs(np.array(probs) - np.array(PUBLISHED_BUCKET_PROBS))) < 5e-3


def test_criterion_3_calibration():
    with criterion(3, "SplitMix64 p-values pass KS uniformity at 1e-6 over 200 runs", budget=120):
        for params in (LinearCompParams(), MatrixRankParams()):
            ps = [
                run_test(GeneratorSource.from_seed(K.SPLITMIX64, seed, LOW32_REVERSED), params).p_value
                for seed in range(1, 201)
            ]
            ks = stats.kstest(ps, "uniform")
            assert ks.pvalue > 1e-6, (params.name, ks)


def test_criterion_4_reversal():
    with criterion(4, "reverse32 vector and exhaustive 16-bit involution", budget=1):
        assert reverse32(0xFF444881) == 0x811222FF
        w = np.arange(1 << 16, dtype=np.uint32)
        for shift in range(17):
            embedded = w << np.uint32(shift)
            assert np.array_equal(reverse32_array(reverse32_array(embedded)), embedded)
        assert all(reverse32(reverse32(x)) == x for x in range(0, 1 << 16, 97))


def test_criterion_5_linear_complexity_table():
    with criterion(5, "LinearComp decisive on all 5 scrambled generators x 10 seeds (low32-rev)", budget=120):
        config = cm.CampaignConfig(SCRAMBLED_KINDS, (LOW32_REVERSED,), (LinearCompParams(),), SEEDS)
        report = cm.run_campaign(config)
        for key, results in report.cells.items():
            assert len(results) == 10 and all(r.verdict.decisive for r in results), key
            assert all(min(r.log10_p, r.log10_1mp) < -10 for r in results)
        assert all(report.systematic.values())


def test_criterion_6_matrix_rank_table():
    with criterion(6, "MatrixRank L=320: 128-bit generators systematic, 1024-bit not", budget=180):
        config = cm.CampaignConfig(SCRAMBLED_KINDS, (LOW32_REVERSED,), (MatrixRankParams(),), SEEDS)
        flags = cm.run_campaign(config).systematic
        for kind in WIDE_128:
            assert flags[(kind, LOW32_REVERSED, "MatrixRank")], kind
        for kind in WIDE_1024:
            assert not flags[(kind, LOW32_REVERSED, "MatrixRank")], kind


def test_criterion_7_control_lanes():
    with criterion(7, "interleave lane and SplitMix64 on every lane: nothing systematic", budget=300):
        tests = cm.DEFAULT_TESTS
        interleave = cm.CampaignConfig(tuple(GeneratorKind), (LaneSpec(Selector.INTERLEAVE),), tests, SEEDS)
        splitmix = cm.CampaignConfig((K.SPLITMIX64,), ALL_LANES, tests, SEEDS)
        for config in (interleave, splitmix):
            report = cm.run_campaign(config)
            assert not report.errors
            assert not any(report.systematic.values()), [k for k, v in report.systematic.items() if v]


def test_criterion_8_determinism():
    with criterion(8, "desk campaign byte-identical with 1 and 2 workers"):
        one = cm.run_campaign(cm.desk_config(workers=1))
        two = cm.run_campaign(cm.desk_config(workers=2))
        assert one.serialize() == two.serialize()
        assert len(one.cells) == 6 * 6 * 2
        verdicts = {r.verdict for cell in one.cells.values() for r in cell}
        assert Verdict.DECISIVE_LOW in verdicts or Verdict.DECISIVE_HIGH in verdicts
        rows = {(r.generator, r.lane): r.failed for r in cm.summarize(one)}
        assert rows[("xorshift128+", "low32-rev")] == ("LinearComp", "MatrixRank")
        assert rows[("xorshift1024*", "low32-rev")] == ("LinearComp",)
        assert not any(failed for (gen, _), failed in rows.items() if gen == "splitmix64")
