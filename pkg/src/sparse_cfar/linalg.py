"""Dense kernels for the ADMM x-update.

The x-update solves ``(A^T A + rho I) v = r`` once per inner iteration. Since
``A`` and ``rho`` are fixed for a problem, the factorization is computed once
and reused by every inner and outer iteration.
"""

from __future__ import annotations

import dataclasses
from typing import Literal

import numpy as np
from scipy import linalg as sla

from .errors import InputError, NumericError

GramMode = Literal["direct", "woodbury"]


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InputError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    return A


def as_vector(v, length=None, name="vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InputError(f"{name} must be 1-D, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise InputError(f"{name} has length {v.shape[0]}, expected {length}")
    return v


@dataclasses.dataclass(frozen=True, eq=False)
class GramFactor:
    """Cached Cholesky factor of ``A^T A + rho I`` (or of ``A A^T + rho I``).

    In ``woodbury`` mode the M x M system is factored and the N x N inverse is
    applied through ``(A^T A + rho I)^-1 = (I - A^T (A A^T + rho I)^-1 A) / rho``.
    """

    A: np.ndarray
    rho: float
    mode: GramMode
    chol: tuple  # (c, lower) as returned by scipy.linalg.cho_factor

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def solve(self, rhs) -> np.ndarray:
        return solve_gram(self, rhs)

    def apply_gram(self, v) -> np.ndarray:
        """Multiply by ``A^T A + rho I`` (used to check solves)."""
        return self.A.T @ (self.A @ v) + self.rho * v


def factorize_gram(A, rho: float, mode: GramMode | None = None) -> GramFactor:
    """Factor the x-update operator for ``(A, rho)``.

    The path is picked by shape unless ``mode`` is given: ``woodbury`` when
    M < N, ``direct`` otherwise.
    """
    A = as_matrix(A)
    if not (np.isfinite(rho) and rho > 0):
        raise InputError(f"rho must be positive and finite, got {rho}")
    m, n = A.shape
    if mode is None:
        mode = "woodbury" if m < n else "direct"
    if mode == "woodbury":
        S = A @ A.T
    elif mode == "direct":
        S = A.T @ A
    else:
        raise InputError(f"unknown factorization mode {mode!r}")
    S[np.diag_indices_from(S)] += rho
    try:
        chol = sla.cho_factor(S, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Cholesky factorization failed: {exc}") from exc
    return GramFactor(A=A, rho=float(rho), mode=mode, chol=chol)


def solve_gram(factor: GramFactor, rhs) -> np.ndarray:
    """Return ``v`` with ``(A^T A + rho I) v = rhs``."""
    rhs = as_vector(rhs, factor.n, "rhs")
    if factor.mode == "direct":
        return sla.cho_solve(factor.chol, rhs, check_finite=False)
    A = factor.A
    w = sla.cho_solve(factor.chol, A @ rhs, check_finite=False)
    return (rhs - A.T @ w) / factor.rho


def soft_threshold(v, kappa: float) -> np.ndarray:
    """Componentwise shrinkage ``sign(v) * max(|v| - kappa, 0)``."""
    if not kappa >= 0:
        raise InputError(f"kappa must be nonnegative, got {kappa}")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
