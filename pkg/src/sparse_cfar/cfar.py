"""Iterative adaptively regularized LASSO-ADMM with a CFAR threshold.

Each outer iteration solves a LASSO, estimates the noise variance from the
matched projection ``A^T y`` restricted to the estimate's zero support, turns
that into a Rayleigh CFAR threshold, prunes the estimate with it and uses the
threshold as the next regularization weight. The loop continues while the
variance estimate strictly increases.

Supports are sorted arrays of 0-based column indices.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Optional

import numpy as np

from .admm import AdmmConfig, AdmmState, SensingProblem, lambda_max, lasso_admm
from .errors import DegenerateSupportError, InputError, InvariantError
from .linalg import GramFactor, as_vector, factorize_gram


class FinalEstimatePolicy(str, enum.Enum):
    PREVIOUS_ITERATE = "previous"
    CURRENT_ITERATE = "current"


class Termination(str, enum.Enum):
    SIGMA_DECREASE = "sigma_decrease"
    EMPTY_SUPPORT = "empty_support"
    L_MAX_REACHED = "l_max_reached"


class Decision(str, enum.Enum):
    CONTINUE_LOOP = "continue_loop"
    TERMINATE = "terminate"


@dataclasses.dataclass(frozen=True)
class CfarConfig:
    """Outer-loop settings.

    ``lambda_init=None`` means ``lambda_scale * lambda_max(A, y)``.
    """

    p_fa: float = 1e-3
    lambda_init: Optional[float] = None
    lambda_scale: float = 0.1
    l_max: int = 50
    final_estimate_policy: FinalEstimatePolicy = FinalEstimatePolicy.PREVIOUS_ITERATE

    def __post_init__(self):
        if not 0 < self.p_fa < 1:
            raise InputError(f"p_fa must lie in (0, 1), got {self.p_fa}")
        if self.lambda_init is not None and not self.lambda_init >= 0:
            raise InputError(f"lambda_init must be nonnegative, got {self.lambda_init}")
        if not self.lambda_scale >= 0:
            raise InputError(f"lambda_scale must be nonnegative, got {self.lambda_scale}")
        if int(self.l_max) != self.l_max or self.l_max < 1:
            raise InputError(f"l_max must be a positive integer, got {self.l_max}")
        object.__setattr__(
            self, "final_estimate_policy", FinalEstimatePolicy(self.final_estimate_policy)
        )


@dataclasses.dataclass(frozen=True)
class OuterIterRecord:
    l: int
    sigma2_hat: float
    t_fa: float
    lambda_used: float
    support_size_before: int
    support_size_after: int
    inner_iterations: int
    inner_converged: bool


@dataclasses.dataclass(frozen=True, eq=False)
class CfarResult:
    x_hat: np.ndarray
    support: np.ndarray
    records: list
    termination: Termination

    @property
    def sparsity_order(self) -> int:
        return int(self.support.size)

    @property
    def outer_iterations(self) -> int:
        return len(self.records)

    @property
    def inner_iterations(self) -> int:
        return sum(r.inner_iterations for r in self.records)


def _as_support(support, n: int) -> np.ndarray:
    idx = np.unique(np.asarray(support, dtype=np.intp))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise InputError(f"support index out of range [0, {n})")
    return idx


def matched_projection(A, y) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A.T @ as_vector(y, A.shape[0], "y")


def restrict_to_zero_support(x_tilde, zero_support) -> np.ndarray:
    """Keep ``x_tilde`` on ``zero_support`` and zero it elsewhere."""
    x_tilde = np.asarray(x_tilde, dtype=float)
    out = np.zeros_like(x_tilde)
    idx = _as_support(zero_support, x_tilde.size)
    out[idx] = x_tilde[idx]
    return out


def residual_noise(A, x_restricted) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A @ as_vector(x_restricted, A.shape[1], "x_restricted")


def estimate_noise_variance(y_tilde, zero_support_size: int) -> float:
    """``sum(y_tilde**2) / (2 * zero_support_size)``.

    The normalizer counts zero-support columns, not measurements.
    """
    if zero_support_size < 1:
        raise DegenerateSupportError("zero support is empty; noise variance undefined")
    y_tilde = np.asarray(y_tilde, dtype=float)
    return float(y_tilde @ y_tilde / (2.0 * zero_support_size))


def cfar_threshold(sigma2_hat: float, p_fa: float) -> float:
    """Rayleigh threshold ``sqrt(-2 sigma2 ln p_fa)``, exceeded with probability ``p_fa``."""
    if not 0 < p_fa < 1:
        raise InputError(f"p_fa must lie in (0, 1), got {p_fa}")
    if not sigma2_hat >= 0:
        raise InputError(f"sigma2_hat must be nonnegative, got {sigma2_hat}")
    return math.sqrt(-2.0 * sigma2_hat * math.log(p_fa))


def update_support(x_hat, support, t_fa: float) -> np.ndarray:
    """Indices of ``support`` where ``|x_hat| > t_fa`` (strict)."""
    x_hat = np.asarray(x_hat, dtype=float)
    idx = _as_support(support, x_hat.size)
    return idx[np.abs(x_hat[idx]) > t_fa]


def threshold_estimate(x_hat, support_updated) -> np.ndarray:
    x_hat = np.asarray(x_hat, dtype=float)
    out = np.zeros_like(x_hat)
    idx = _as_support(support_updated, x_hat.size)
    out[idx] = x_hat[idx]
    return out


def stopping_decision(sigma2_curr: float, sigma2_prev: float) -> Decision:
    return Decision.CONTINUE_LOOP if sigma2_curr > sigma2_prev else Decision.TERMINATE


def iar_lasso_admm_cfar(
    problem: SensingProblem,
    admm_cfg: AdmmConfig = AdmmConfig(),
    cfar_cfg: CfarConfig = CfarConfig(),
    factor: Optional[GramFactor] = None,
) -> CfarResult:
    """Run the adaptively regularized outer loop around :func:`lasso_admm`.

    Supports come from the inner solver's exactly sparse ``z`` iterate. On a
    variance decrease the default policy returns the previous iteration's
    pruned estimate; ``CURRENT_ITERATE`` returns the one just computed.
    """
    A, y = problem.A, problem.y
    n = problem.n
    if problem.m < 2:
        raise InputError("need at least two measurements")
    if factor is None:
        factor = factorize_gram(A, admm_cfg.rho)

    lam = cfar_cfg.lambda_init
    if lam is None:
        lam = cfar_cfg.lambda_scale * lambda_max(A, y)
    x_tilde = matched_projection(A, y)

    records: list[OuterIterRecord] = []
    init = AdmmState.zeros(n)
    sigma2_prev = 0.0
    prev_estimate: Optional[tuple[np.ndarray, np.ndarray]] = None
    estimate = (np.zeros(n), np.zeros(0, dtype=np.intp))

    for l in range(int(cfar_cfg.l_max)):
        inner = lasso_admm(problem, lam, admm_cfg, factor, init)
        x_l = inner.z_sparse
        nonzero = np.flatnonzero(x_l)
        zero = np.flatnonzero(x_l == 0)

        if nonzero.size == 0:
            return CfarResult(np.zeros(n), nonzero, records, Termination.EMPTY_SUPPORT)
        if zero.size == 0:
            return CfarResult(x_l.copy(), nonzero, records, Termination.EMPTY_SUPPORT)

        y_tilde = residual_noise(A, restrict_to_zero_support(x_tilde, zero))
        sigma2 = estimate_noise_variance(y_tilde, zero.size)
        t_fa = cfar_threshold(sigma2, cfar_cfg.p_fa)
        kept = update_support(x_l, nonzero, t_fa)
        estimate = (threshold_estimate(x_l, kept), kept)
        records.append(
            OuterIterRecord(
                l=l,
                sigma2_hat=sigma2,
                t_fa=t_fa,
                lambda_used=float(lam),
                support_size_before=int(nonzero.size),
                support_size_after=int(kept.size),
                inner_iterations=inner.iterations,
                inner_converged=inner.converged,
            )
        )

        if stopping_decision(sigma2, sigma2_prev) is Decision.TERMINATE:
            if (
                cfar_cfg.final_estimate_policy is FinalEstimatePolicy.PREVIOUS_ITERATE
                and prev_estimate is not None
            ):
                estimate = prev_estimate
            return CfarResult(estimate[0], estimate[1], records, Termination.SIGMA_DECREASE)

        sigma2_prev = sigma2
        prev_estimate = estimate
        lam = t_fa
        init = AdmmState.warm(estimate[0])

    return CfarResult(estimate[0], estimate[1], records, Termination.L_MAX_REACHED)


def check_invariants(result: CfarResult, cfar_cfg: CfarConfig) -> None:
    """Raise :class:`InvariantError` if a structural property of the loop fails."""
    recs = result.records
    if len(recs) > cfar_cfg.l_max:
        raise InvariantError(f"{len(recs)} outer iterations exceed l_max={cfar_cfg.l_max}")
    # the first lambda is the initial guess; every later one is a threshold
    lams = [r.lambda_used for r in recs[1:]]
    for a, b in zip(lams, lams[1:]):
        if not b > a:
            raise InvariantError(f"lambda sequence not strictly increasing: {a} -> {b}")
    for r in recs:
        if r.support_size_after > r.support_size_before:
            raise InvariantError(f"support grew at outer iteration {r.l}")
    off = np.ones(result.x_hat.size, dtype=bool)
    off[result.support] = False
    if np.any(result.x_hat[off] != 0):
        raise InvariantError("estimate is nonzero outside its support")
