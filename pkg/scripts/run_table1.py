#!/usr/bin/env python3
"""Fixed-sparsity comparison of plain LASSO-ADMM and the CFAR outer loop.

    python scripts/run_table1.py                 # desk preset, 20 trials
    python scripts/run_table1.py --preset paper  # M=1024, N=4096, k=150, 50 trials (slow)
"""

import argparse

from _common import summarize

from sparse_cfar import bench

parser = argparse.ArgumentParser()
parser.add_argument("--preset", choices=sorted(bench.PRESETS), default="desk")
parser.add_argument("--trials", type=int)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--out")
args = parser.parse_args()

pre = bench.PRESETS[args.preset]
params = bench.BenchParams(
    m=pre["m"], n=pre["n"], ks=(pre["k"],), sigmas=(pre["sigma"],), p_fa=pre["p_fa"],
    trials=args.trials or pre["trials"], seed=args.seed, threads=bench.thread_count(),
)
report = bench.run_fixed_sparsity(params)
summarize(report)
if args.out:
    with open(args.out, "w") as fh:
        fh.write(report.to_csv())
