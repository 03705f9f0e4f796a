"""Null calibration: p-value uniformity of both tests on a good generator.

Prints the fraction of runs inside (1e-4, 1 - 1e-4), the KS p-value against
U(0, 1) and a 10-bin histogram per test.
"""

import argparse

import numpy as np
from scipy import stats

from xsaudit.battery import LinearCompParams, MatrixRankParams, run_test
from xsaudit.bitlane import GeneratorSource, LaneSpec, NumpySource
from xsaudit.prng import GeneratorKind


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--source", choices=["splitmix64", "numpy"], default="splitmix64")
    ap.add_argument("--lane", type=LaneSpec.parse, default="low32-rev")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    for params in (LinearCompParams(), MatrixRankParams()):
        ps = []
        for seed in range(1, args.runs + 1):
            if args.source == "numpy":
                src = NumpySource(rng)
            else:
                src = GeneratorSource.from_seed(GeneratorKind.SPLITMIX64, seed, args.lane)
            ps.append(run_test(src, params).p_value)
        ps = np.array(ps)
        inside = np.mean((ps > 1e-4) & (ps < 1 - 1e-4))
        hist, _ = np.histogram(ps, bins=10, range=(0, 1))
        print(f"{params.name:<11} inside={inside:.3f}  KS p={stats.kstest(ps, 'uniform').pvalue:.3g}  hist={hist.tolist()}")


if __name__ == "__main__":
    main()
