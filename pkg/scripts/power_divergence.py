#!/usr/bin/env python3
"""Lock-in frequency of the dual-vector power iteration on diag(2, 1).

The iteration settles on the wrong row whenever the Gaussian start lands
in a fixed cone, so it returns 1 instead of 2 with probability
(2/pi) * arctan(1/2) ~ 0.2951 no matter how many iterations it runs.
"""

import argparse
import math

from twoinf import DenseMatrix, RngStream, adaptive_power


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--iterations", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    op = DenseMatrix([[2.0, 0.0], [0.0, 1.0]])
    wrong = 0
    for k in range(args.trials):
        est = adaptive_power(op, args.iterations, RngStream(args.seed + k))
        wrong += abs(est.value - 1.0) < 1e-9
    frequency = wrong / args.trials
    closed_form = 2.0 / math.pi * math.atan(0.5)
    print(f"trials            : {args.trials}")
    print(f"iterations        : {args.iterations}")
    print(f"returned 1 (wrong): {wrong}  ({frequency:.4f})")
    print(f"closed form       : {closed_form:.4f}")


if __name__ == "__main__":
    main()
