"""Command-line entry point: ``sparse-cfar {solve,generate,bench}``.

Exit status: 0 on success, 2 on usage errors, 3 on numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .admm import AdmmConfig, SensingProblem, lambda_max, lasso_admm, objective
from .cfar import CfarConfig, iar_lasso_admm_cfar
from .errors import DivergenceError, InputError, NumericError
from .fileio import read_matrix, read_vector, write_matrix, write_vector
from .metrics import mse
from .synth import ENSEMBLES, SynthSpec, synthesize

EXIT_USAGE = 2
EXIT_DIVERGENCE = 3


def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--rho", type=float, default=0.9)
    g.add_argument("--alpha", type=float, default=1.5)
    g.add_argument("--eps-abs", type=float, default=1e-5)
    g.add_argument("--eps-rel", type=float, default=1e-4)
    g.add_argument("--tmax", type=int, default=1000)
    g.add_argument("--lmax", type=int, default=50)
    g.add_argument("--lambda-scale", type=float, default=0.1)
    g.add_argument("--pfa", type=float, default=None, help="CFAR false-alarm rate (default 1e-3)")
    g.add_argument("--final-policy", choices=("previous", "current"), default="previous")


def _configs(args, p_fa):
    admm = AdmmConfig(rho=args.rho, alpha=args.alpha, eps_abs=args.eps_abs,
                      eps_rel=args.eps_rel, t_max=args.tmax)
    cfar = CfarConfig(p_fa=p_fa, lambda_scale=args.lambda_scale, l_max=args.lmax,
                      final_estimate_policy=args.final_policy)
    return admm, cfar


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparse-cfar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="recover x from a matrix file and a measurement CSV")
    p.add_argument("--matrix", required=True, help="Matrix Market array file holding A")
    p.add_argument("--y", required=True, help="single-column CSV with header 'y'")
    p.add_argument("--x-true", help="optional ground truth CSV (header 'x') for an MSE report")
    p.add_argument("--algorithm", choices=bench.ALGORITHMS, default="iar_cfar")
    p.add_argument("--out", help="write the estimate as CSV with header 'x_hat'")
    _add_solver_flags(p)

    p = sub.add_parser("generate", help="write a synthetic instance as A.mtx, y.csv, x_true.csv")
    p.add_argument("--m", type=int, default=256)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ensemble", choices=ENSEMBLES, default="orthonormal_rows")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("bench", help="Monte-Carlo experiments")
    bsub = p.add_subparsers(dest="experiment", required=True)
    for name, help_ in (("fixed", "fixed sparsity order (Table I setting)"),
                        ("snr", "sweep over SNR"),
                        ("sparsity", "sweep over the true sparsity order")):
        b = bsub.add_parser(name, help=help_)
        b.add_argument("--preset", choices=sorted(bench.PRESETS), default="desk")
        b.add_argument("--m", type=int)
        b.add_argument("--n", type=int)
        b.add_argument("--k", type=int, nargs="+")
        b.add_argument("--sigma", type=float, nargs="+")
        b.add_argument("--snr-db", type=float, nargs="+")
        b.add_argument("--trials", type=int)
        b.add_argument("--seed", type=int, default=0)
        b.add_argument("--ensemble", choices=ENSEMBLES, default="orthonormal_rows")
        b.add_argument("--timing", action="store_true",
                       help="record wall time (makes output non-reproducible)")
        b.add_argument("--out", help="CSV path; a <out>.json config echo is written beside it")
        _add_solver_flags(b)
    return parser


def _bench_params(args) -> bench.BenchParams:
    preset = bench.PRESETS[args.preset]
    m = args.m if args.m is not None else preset["m"]
    n = args.n if args.n is not None else preset["n"]
    p_fa = args.pfa if args.pfa is not None else preset["p_fa"]
    trials = args.trials if args.trials is not None else preset["trials"]
    if args.sigma is not None and args.snr_db is not None:
        raise InputError("give --sigma or --snr-db, not both")

    if args.snr_db is not None:
        sigmas = bench.sigmas_from_snr(args.snr_db)
    elif args.sigma is not None:
        sigmas = tuple(args.sigma)
    elif args.experiment == "snr":
        sigmas = bench.sigmas_from_snr(bench.SNR_GRID_DB)
    elif args.experiment == "sparsity":
        sigmas = (bench.SPARSITY_SIGMA,)
    else:
        sigmas = (preset["sigma"],)

    if args.k is not None:
        ks = tuple(args.k)
    elif args.experiment == "sparsity":
        ks = tuple(k for k in bench.SPARSITY_GRID[args.preset] if k < m)
    else:
        ks = (preset["k"],)

    if args.experiment == "fixed" and (len(ks) != 1 or len(sigmas) != 1):
        raise InputError("bench fixed takes a single --k and a single --sigma/--snr-db")
    if args.experiment == "snr" and len(ks) != 1:
        raise InputError("bench snr takes a single --k")
    if args.experiment == "sparsity" and len(sigmas) != 1:
        raise InputError("bench sparsity takes a single --sigma/--snr-db")

    admm, cfar = _configs(args, p_fa)
    return bench.BenchParams(
        m=m, n=n, ks=ks, sigmas=sigmas, p_fa=p_fa, trials=trials, seed=args.seed,
        admm=admm, cfar=cfar, ensemble=args.ensemble, timing=args.timing,
        threads=bench.thread_count(),
    )


def _cmd_bench(args) -> int:
    params = _bench_params(args)
    runner = {"fixed": bench.run_fixed_sparsity, "snr": bench.run_snr_sweep,
              "sparsity": bench.run_sparsity_sweep}[args.experiment]
    report = runner(params)
    text = report.to_csv()
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        out.with_suffix(".json").write_text(json.dumps(report.config, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_solve(args) -> int:
    A = read_matrix(args.matrix)
    y = read_vector(args.y, header="y")
    x_true = read_vector(args.x_true, header="x") if args.x_true else None
    problem = SensingProblem(A=A, y=y, x_true=x_true)
    admm, cfar = _configs(args, args.pfa if args.pfa is not None else 1e-3)
    lam0 = cfar.lambda_scale * lambda_max(A, y)
    if args.algorithm == "lasso_admm":
        x_hat = lasso_admm(problem, lam0, admm).z_sparse
        summary = {}
    else:
        result = iar_lasso_admm_cfar(problem, admm, cfar)
        x_hat = result.x_hat
        summary = {"outer_iterations": result.outer_iterations,
                   "termination": result.termination.value}
    summary = {"algorithm": args.algorithm, "k_hat": int(np.count_nonzero(x_hat)),
               "objective": objective(A, y, x_hat, lam0), **summary}
    if x_true is not None:
        summary["mse"] = mse(x_hat, x_true)
    if args.out:
        write_vector(args.out, x_hat, "x_hat")
    print(json.dumps(summary))
    return 0


def _cmd_generate(args) -> int:
    spec = SynthSpec(args.m, args.n, args.k, args.sigma, args.seed, args.ensemble)
    problem = synthesize(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "A.mtx", problem.A)
    write_vector(out / "y.csv", problem.y, "y")
    write_vector(out / "x_true.csv", problem.x_true, "x")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_generate(args)
    except (InputError, OSError) as exc:
        print(f"sparse-cfar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"sparse-cfar: diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except NumericError as exc:
        print(f"sparse-cfar: numeric error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
