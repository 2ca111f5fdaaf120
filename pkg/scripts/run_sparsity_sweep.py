#!/usr/bin/env python3
"""Mean MSE and sparsity-order estimate versus the true sparsity order, sigma = 0.01."""

import argparse

from _common import summarize

from sparse_cfar import bench

parser = argparse.ArgumentParser()
parser.add_argument("--preset", choices=sorted(bench.PRESETS), default="desk")
parser.add_argument("--k", type=int, nargs="+")
parser.add_argument("--sigma", type=float, default=bench.SPARSITY_SIGMA)
parser.add_argument("--trials", type=int)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--out")
args = parser.parse_args()

pre = bench.PRESETS[args.preset]
ks = tuple(args.k) if args.k else tuple(k for k in bench.SPARSITY_GRID[args.preset] if k < pre["m"])
params = bench.BenchParams(
    m=pre["m"], n=pre["n"], ks=ks, sigmas=(args.sigma,), p_fa=pre["p_fa"],
    trials=args.trials or pre["trials"], seed=args.seed, threads=bench.thread_count(),
)
report = bench.run_sparsity_sweep(params)
summarize(report)
if args.out:
    with open(args.out, "w") as fh:
        fh.write(report.to_csv())
