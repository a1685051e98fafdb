#!/usr/bin/env python3
"""Scan how the empirical ratio constant responds to endpoint misalignment.

The square-function bound for interval projections carries an unspecified
constant; whether that constant grows when the interval endpoints carry many
binary digits is an open experimental question.  This script runs the scalar
campaign with the same trial budget against dyadic-aligned, random, and
maximally misaligned families and prints the resulting constants side by
side.  Nothing here is asserted; the output is data.
"""

import argparse
import sys

from walshlab.experiments import ExperimentConfig, run_scalar_lpr


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=8)
    parser.add_argument("--trials", type=int, default=3000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=5)
    args = parser.parse_args()

    print(f"{'p':>4} {'family':>12} {'max':>10} {'mean':>10} {'q99':>10}")
    for p in (2.0, 4.0, 8.0):
        for family in ("dyadic", "random", "misaligned", "singletons"):
            cfg = ExperimentConfig(
                kind="scalar",
                resolution=args.resolution,
                trials=args.trials,
                seed=args.seed,
                p=p,
                family=family,
                count=args.count,
                probes=False,  # random trials only; probes would mask the contrast
            )
            rep = run_scalar_lpr(cfg)
            s = rep.summary
            print(
                f"{p:>4g} {family:>12} {s['max']:>10.5f} {s['mean']:>10.5f} "
                f"{s['q99']:>10.5f}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
