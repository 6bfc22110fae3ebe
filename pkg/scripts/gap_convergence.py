#!/usr/bin/env python3
"""Convergence-versus-budget experiment on gap-controlled square matrices.

For each requested row-norm gap, runs every estimator over a schedule of
matvec budgets and writes one CSV per gap (plus a summary table to stdout).
Desk-scale counterpart of the square-matrix comparison experiment.
"""

import argparse
from pathlib import Path

from twoinf import BenchConfig, GapMatrixSpec, run_bench, summarize
from twoinf.bench import KNOWN_METHODS


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=500, help="matrix side d = n")
    ap.add_argument("--gaps", default="0.01,0.1", help="comma list of row-norm gaps")
    ap.add_argument("--budgets", default="10,50,100,200,400,800")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="results", help="directory for the CSV files")
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    budgets = tuple(int(b) for b in args.budgets.split(","))
    for gap in (float(g) for g in args.gaps.split(",")):
        out = out_dir / f"gap_{gap:g}_d{args.size}.csv"
        cfg = BenchConfig(
            source=GapMatrixSpec(args.size, args.size, gap, args.seed),
            methods=KNOWN_METHODS,
            budgets=budgets,
            trials=args.trials,
            base_seed=args.seed,
            out=out,
            include_walltime=False,
        )
        records = run_bench(cfg)
        print(f"# gap={gap:g}, d=n={args.size}, {args.trials} trials -> {out}")
        print(f"{'method':<22} {'budget':>7} {'mean_rel_error':>15} {'stderr':>11}")
        for row in summarize(records):
            print(f"{row.method:<22} {row.matvec_budget:>7} "
                  f"{row.mean_rel_error:>15.6e} {row.stderr:>11.3e}")
        print()


if __name__ == "__main__":
    main()
