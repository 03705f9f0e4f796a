"""Exploratory: matrix rank with several bits per word (s > 1).

With s bits from each word the tested bits are no longer a single linear
coordinate of the state, so detection at small L is not guaranteed. This
sweeps L and s for one generator and prints the verdicts across seeds.
"""

import argparse

from xsaudit.battery import MatrixRankParams, run_test
from xsaudit.bitlane import GeneratorSource, LaneSpec
from xsaudit.prng import GeneratorKind


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gen", type=GeneratorKind.parse, default="xorshift128plus")
    ap.add_argument("--lane", type=LaneSpec.parse, default="low32-rev")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--L", type=int, nargs="+", default=[64, 160, 320])
    ap.add_argument("--s", type=int, nargs="+", default=[1, 2, 4, 8])
    args = ap.parse_args()

    for L in args.L:
        for s in args.s:
            if L % s:
                continue
            params = MatrixRankParams(L=L, N=20, s=s)
            verdicts = [
                run_test(GeneratorSource.from_seed(args.gen, seed, args.lane), params)
                for seed in range(1, args.seeds + 1)
            ]
            line = " ".join(f"{r.verdict.value}:{r.detail['max_rank']}" for r in verdicts)
            print(f"L={L:<4} s={s:<2} {line}")


if __name__ == "__main__":
    main()
