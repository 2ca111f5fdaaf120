"""LASSO solved by over-relaxed ADMM.

Minimizes ``(1/2)||y - A x||_2^2 + lam ||x||_1`` with the splitting ``x = z``:
the smooth term goes to the x-update (a cached Gram solve), the l1 term to the
z-update (soft thresholding), and ``u`` is the scaled dual variable.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple, Optional

import numpy as np

from .errors import DivergenceError, InputError
from .linalg import GramFactor, as_matrix, as_vector, factorize_gram, soft_threshold


@dataclasses.dataclass(frozen=True, eq=False)
class SensingProblem:
    """Measurements ``y = A x + n`` plus optional ground truth for metrics."""

    A: np.ndarray
    y: np.ndarray
    x_true: Optional[np.ndarray] = None
    sigma_true: Optional[float] = None

    def __post_init__(self):
        A = as_matrix(self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", as_vector(self.y, A.shape[0], "y"))
        if self.x_true is not None:
            object.__setattr__(self, "x_true", as_vector(self.x_true, A.shape[1], "x_true"))
        if self.sigma_true is not None and not self.sigma_true >= 0:
            raise InputError(f"sigma_true must be nonnegative, got {self.sigma_true}")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclasses.dataclass(frozen=True)
class AdmmConfig:
    rho: float = 0.9
    alpha: float = 1.5
    eps_abs: float = 1e-5
    eps_rel: float = 1e-4
    t_max: int = 1000

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise InputError(f"rho must be positive, got {self.rho}")
        if not 0 < self.alpha < 2:
            raise InputError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not (self.eps_abs > 0 and self.eps_rel > 0):
            raise InputError("tolerances must be positive")
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise InputError(f"t_max must be a positive integer, got {self.t_max}")


@dataclasses.dataclass(frozen=True, eq=False)
class AdmmState:
    x: np.ndarray
    z: np.ndarray
    u: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "AdmmState":
        return cls(np.zeros(n), np.zeros(n), np.zeros(n))

    @classmethod
    def warm(cls, estimate) -> "AdmmState":
        """Start with ``x = z = estimate`` and a reset dual."""
        estimate = np.asarray(estimate, dtype=float)
        return cls(estimate.copy(), estimate.copy(), np.zeros_like(estimate))


class ResidualRecord(NamedTuple):
    r_pri: float
    r_dual: float
    eps_pri: float
    eps_dual: float


@dataclasses.dataclass(frozen=True, eq=False)
class AdmmResult:
    x_dense: np.ndarray
    z_sparse: np.ndarray
    u_final: np.ndarray
    iterations: int
    converged: bool
    residual_history: list

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.z_sparse)


def residuals(z_new, z_old, x_new, rho: float) -> tuple[float, float]:
    """Primal residual ``||x - z||`` and dual residual ``||rho (z - z_old)||``."""
    z_new, z_old, x_new = (np.asarray(v, dtype=float) for v in (z_new, z_old, x_new))
    if not (z_new.shape == z_old.shape == x_new.shape):
        raise InputError("residuals: vectors must have equal lengths")
    return float(np.linalg.norm(x_new - z_new)), float(np.linalg.norm(rho * (z_new - z_old)))


def tolerances(x, z, u, rho: float, config: AdmmConfig) -> tuple[float, float]:
    x, z, u = (np.asarray(v, dtype=float) for v in (x, z, u))
    if not (x.shape == z.shape == u.shape):
        raise InputError("tolerances: vectors must have equal lengths")
    base = math.sqrt(x.shape[0]) * config.eps_abs
    eps_pri = base + config.eps_rel * max(np.linalg.norm(x), np.linalg.norm(z))
    eps_dual = base + config.eps_rel * np.linalg.norm(rho * u)
    return float(eps_pri), float(eps_dual)


def objective(A, y, x, lam: float) -> float:
    """LASSO objective ``(1/2)||y - A x||^2 + lam ||x||_1``."""
    A = np.asarray(A, dtype=float)
    y = as_vector(y, A.shape[0], "y")
    x = as_vector(x, A.shape[1], "x")
    r = y - A @ x
    return float(0.5 * (r @ r) + lam * np.abs(x).sum())


def lambda_max(A, y) -> float:
    """``||A^T y||_inf``, the smallest lam for which the LASSO solution is 0."""
    A = np.asarray(A, dtype=float)
    y = as_vector(y, A.shape[0], "y")
    if A.ndim != 2:
        raise InputError("A must be 2-D")
    return float(np.max(np.abs(A.T @ y)))


def lasso_admm(
    problem: SensingProblem,
    lam: float,
    config: AdmmConfig = AdmmConfig(),
    factor: Optional[GramFactor] = None,
    init: Optional[AdmmState] = None,
) -> AdmmResult:
    """Run ADMM on the LASSO until both residuals fall below tolerance.

    ``factor`` must have been built from ``(problem.A, config.rho)``; it is
    built here when omitted. ``init`` defaults to all zeros. Only ``z`` and
    ``u`` of the initial state enter the first x-update.
    """
    if not lam >= 0:
        raise InputError(f"lambda must be nonnegative, got {lam}")
    A, y = problem.A, problem.y
    n = problem.n
    rho, alpha = config.rho, config.alpha
    if factor is None:
        factor = factorize_gram(A, rho)
    elif factor.rho != rho or factor.A.shape != A.shape:
        raise InputError("Gram factor does not match (A, rho)")
    if init is None:
        init = AdmmState.zeros(n)
    x = as_vector(init.x, n, "init.x").copy()
    z = as_vector(init.z, n, "init.z").copy()
    u = as_vector(init.u, n, "init.u").copy()

    Aty = A.T @ y
    kappa = lam / rho
    history = []
    converged = False
    it = 0
    for it in range(1, int(config.t_max) + 1):
        x_solve = factor.solve(Aty + rho * (z - u))
        x = alpha * x_solve + (1.0 - alpha) * z
        z_old = z
        z = soft_threshold(x + u, kappa)
        u = u + x - z
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z)) and np.all(np.isfinite(u))):
            raise DivergenceError(it)

        r_pri, r_dual = residuals(z, z_old, x, rho)
        eps_pri, eps_dual = tolerances(x, z, u, rho, config)
        history.append(ResidualRecord(r_pri, r_dual, eps_pri, eps_dual))
        if r_pri < eps_pri and r_dual < eps_dual:
            converged = True
            break

    # -0.0 from the shrinkage is normalized so the sparse iterate has plain zeros
    z = z + 0.0
    return AdmmResult(
        x_dense=x,
        z_sparse=z,
        u_final=u,
        iterations=it,
        converged=converged,
        residual_history=history,
    )
