"""Reproduce the systematic-failure table for the reversed low 32 bits.

    python3 scripts/headline.py [--seeds 10] [--workers 1] [--out results/scrambled]
"""

import argparse
import time
from pathlib import Path

from xsaudit.campaign import run_campaign, summarize, scrambled_config
from xsaudit.cli import write_campaign
from xsaudit.formats import OutputFormat, render_summary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    t0 = time.perf_counter()
    report = run_campaign(scrambled_config(args.seeds, args.workers))
    print(render_summary(summarize(report), OutputFormat.MARKDOWN), end="")
    print(f"\n{len(report.config.seeds)} seeds, {time.perf_counter() - t0:.1f} s")
    if args.out:
        write_campaign(report, args.out, OutputFormat.MARKDOWN)


if __name__ == "__main__":
    main()
