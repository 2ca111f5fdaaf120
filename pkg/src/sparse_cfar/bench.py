"""Seeded Monte-Carlo experiments comparing plain LASSO-ADMM with the CFAR outer loop.

Trial ``t`` of block ``b`` draws its instance from substream ``(seed, b, t)``,
so results do not depend on scheduling or on the number of worker threads.
"""

from __future__ import annotations

import dataclasses
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from .admm import AdmmConfig, lambda_max, lasso_admm, objective
from .cfar import CfarConfig, check_invariants, iar_lasso_admm_cfar
from .errors import InputError
from .linalg import factorize_gram
from .metrics import mse, snr_db
from .synth import ENSEMBLES, SynthSpec, synthesize, trial_rng

ALGORITHMS = ("lasso_admm", "iar_cfar")
METRICS = ("k_hat", "mse", "objective", "inner_iterations", "outer_iterations", "wall_time_s")
COLUMNS = (
    "row_type", "block", "m", "n", "k", "sigma", "snr_db", "p_fa",
    "algorithm", "trial", "seed",
) + METRICS

PRESETS = {
    "desk": dict(m=256, n=1024, k=30, sigma=0.05, p_fa=1e-3, trials=20),
    "paper": dict(m=1024, n=4096, k=150, sigma=0.05, p_fa=1e-3, trials=50),
}
# sweep grids used when none is given on the command line
SNR_GRID_DB = (10.0, 15.0, 20.0, 25.0, 30.0)
SPARSITY_GRID = {
    "desk": (4, 10, 20, 30, 45, 60),
    "paper": (4, 30, 60, 90, 120, 150, 180, 210, 240),
}
SPARSITY_SIGMA = 0.01


@dataclasses.dataclass(frozen=True)
class BenchParams:
    m: int
    n: int
    ks: tuple
    sigmas: tuple
    p_fa: float = 1e-3
    trials: int = 20
    seed: int = 0
    admm: AdmmConfig = AdmmConfig()
    cfar: Optional[CfarConfig] = None
    ensemble: str = "orthonormal_rows"
    timing: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if not self.ks or not self.sigmas:
            raise InputError("need at least one k and one sigma")
        for k in self.ks:
            if not 0 <= k < self.m:
                raise InputError(f"k={k} must satisfy 0 <= k < m={self.m}")
        for s in self.sigmas:
            if not (math.isfinite(s) and s >= 0):
                raise InputError(f"sigma must be nonnegative, got {s}")
        if self.m > self.n:
            raise InputError("m must not exceed n")
        if self.ensemble not in ENSEMBLES:
            raise InputError(f"unknown ensemble {self.ensemble!r}")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.cfar is None:
            object.__setattr__(self, "cfar", CfarConfig(p_fa=self.p_fa))
        elif self.cfar.p_fa != self.p_fa:
            raise InputError("p_fa disagrees with cfar.p_fa")

    def blocks(self):
        """``(block index, k, sigma)`` for every grid point, in output order."""
        if len(self.ks) > 1 and len(self.sigmas) > 1:
            raise InputError("sweep over k or over sigma, not both")
        if len(self.ks) > 1:
            return [(b, k, self.sigmas[0]) for b, k in enumerate(self.ks)]
        return [(b, self.ks[0], s) for b, s in enumerate(self.sigmas)]

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d["cfar"]["final_estimate_policy"] = self.cfar.final_estimate_policy.value
        d["ks"], d["sigmas"] = list(self.ks), list(self.sigmas)
        d.pop("threads")
        return d


@dataclasses.dataclass(frozen=True)
class TrialRow:
    block: int
    m: int
    n: int
    k: int
    sigma: float
    p_fa: float
    algorithm: str
    trial: int
    seed: int
    k_hat: int
    mse: float
    objective: float
    inner_iterations: int
    outer_iterations: int
    wall_time_s: Optional[float]

    @property
    def snr_db(self) -> float:
        return snr_db(self.sigma) if self.sigma > 0 else math.inf


@dataclasses.dataclass
class ExperimentReport:
    experiment: str
    config: dict
    rows: list

    def groups(self):
        keys = []
        for r in self.rows:
            key = (r.block, r.algorithm)
            if key not in keys:
                keys.append(key)
        return [(key, [r for r in self.rows if (r.block, r.algorithm) == key]) for key in keys]

    def aggregates(self):
        """``(template row, means, stds)`` per (block, algorithm); std is the sample std."""
        out = []
        for _, rows in self.groups():
            means, stds = {}, {}
            for name in METRICS:
                vals = [getattr(r, name) for r in rows]
                if any(v is None for v in vals):
                    means[name] = stds[name] = None
                    continue
                arr = np.asarray(vals, dtype=float)
                means[name] = float(np.mean(arr))
                stds[name] = float(np.std(arr, ddof=1)) if arr.size > 1 else math.nan
            out.append((rows[0], means, stds))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(COLUMNS) + "\n")
        for r in self.rows:
            buf.write(_line("trial", r, r.trial, {name: getattr(r, name) for name in METRICS}))
        for r, means, stds in self.aggregates():
            buf.write(_line("mean", r, None, means))
            buf.write(_line("std", r, None, stds))
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _line(row_type, r: TrialRow, trial, metrics) -> str:
    fields = [
        row_type, r.block, r.m, r.n, r.k, r.sigma, r.snr_db, r.p_fa,
        r.algorithm, trial, r.seed,
    ] + [metrics[name] for name in METRICS]
    return ",".join(f if isinstance(f, str) else _fmt(f) for f in fields) + "\n"


def run_trial(params: BenchParams, block: int, k: int, sigma: float, trial: int):
    """One seeded instance solved by both algorithms; returns two :class:`TrialRow`."""
    spec = SynthSpec(params.m, params.n, k, sigma, params.seed, params.ensemble)
    problem = synthesize(spec, trial_rng(params.seed, block, trial))
    lam0 = params.cfar.lambda_scale * lambda_max(problem.A, problem.y)
    factor = factorize_gram(problem.A, params.admm.rho)
    common = dict(block=block, m=params.m, n=params.n, k=k, sigma=sigma,
                  p_fa=params.p_fa, trial=trial, seed=params.seed)

    t0 = time.perf_counter()
    plain = lasso_admm(problem, lam0, params.admm, factor)
    t1 = time.perf_counter()
    result = iar_lasso_admm_cfar(problem, params.admm, params.cfar, factor)
    t2 = time.perf_counter()
    check_invariants(result, params.cfar)

    rows = []
    for name, x_hat, inner, outer, dt in (
        ("lasso_admm", plain.z_sparse, plain.iterations, 0, t1 - t0),
        ("iar_cfar", result.x_hat, result.inner_iterations, result.outer_iterations, t2 - t1),
    ):
        rows.append(TrialRow(
            algorithm=name,
            k_hat=int(np.count_nonzero(x_hat)),
            mse=mse(x_hat, problem.x_true),
            objective=objective(problem.A, problem.y, x_hat, lam0),
            inner_iterations=int(inner),
            outer_iterations=int(outer),
            wall_time_s=dt if params.timing else None,
            **common,
        ))
    return rows


def thread_count(env: Optional[str] = None) -> int:
    """Worker count from ``SPARSE_CFAR_THREADS`` (unset or 0 = one per CPU)."""
    raw = os.environ.get("SPARSE_CFAR_THREADS", "") if env is None else env
    try:
        n = int(raw) if raw.strip() else 0
    except ValueError:
        raise InputError(f"SPARSE_CFAR_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise InputError("SPARSE_CFAR_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def run_experiment(experiment: str, params: BenchParams) -> ExperimentReport:
    jobs = [(b, k, s, t) for b, k, s in params.blocks() for t in range(params.trials)]
    if params.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=params.threads) as pool:
            results = list(pool.map(lambda j: run_trial(params, *j), jobs))
    else:
        results = [run_trial(params, *j) for j in jobs]
    rows = [row for pair in results for row in pair]
    rows.sort(key=lambda r: (r.block, ALGORITHMS.index(r.algorithm), r.trial))
    config = params.echo()
    config["experiment"] = experiment
    return ExperimentReport(experiment, config, rows)


def run_fixed_sparsity(params: BenchParams) -> ExperimentReport:
    if len(params.ks) != 1 or len(params.sigmas) != 1:
        raise InputError("fixed-sparsity experiment takes one k and one sigma")
    return run_experiment("fixed", params)


def run_snr_sweep(params: BenchParams) -> ExperimentReport:
    if len(params.ks) != 1:
        raise InputError("SNR sweep takes one k")
    if len(params.sigmas) < 1:
        raise InputError("SNR sweep needs at least one SNR point")
    return run_experiment("snr", params)


def run_sparsity_sweep(params: BenchParams) -> ExperimentReport:
    if len(params.sigmas) != 1:
        raise InputError("sparsity sweep takes one sigma")
    return run_experiment("sparsity", params)


def sigmas_from_snr(snr_values_db: Sequence[float]) -> tuple:
    return tuple(float(10.0 ** (-s / 20.0)) for s in snr_values_db)
