#!/usr/bin/env python3
"""Mean MSE and sparsity-order estimate versus SNR (tidy CSV via --out)."""

import argparse

from _common import summarize

from sparse_cfar import bench

parser = argparse.ArgumentParser()
parser.add_argument("--preset", choices=sorted(bench.PRESETS), default="desk")
parser.add_argument("--snr-db", type=float, nargs="+", default=list(bench.SNR_GRID_DB))
parser.add_argument("--trials", type=int)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--out")
args = parser.parse_args()

pre = bench.PRESETS[args.preset]
params = bench.BenchParams(
    m=pre["m"], n=pre["n"], ks=(pre["k"],), sigmas=bench.sigmas_from_snr(args.snr_db),
    p_fa=pre["p_fa"], trials=args.trials or pre["trials"], seed=args.seed,
    threads=bench.thread_count(),
)
report = bench.run_snr_sweep(params)
summarize(report)
if args.out:
    with open(args.out, "w") as fh:
        fh.write(report.to_csv())
