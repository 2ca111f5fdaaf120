"""Reconstruction metrics and a slow, independent LASSO reference solver."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .admm import SensingProblem, objective
from .errors import InputError
from .linalg import as_vector, soft_threshold


@dataclasses.dataclass(frozen=True)
class Metrics:
    mse: float
    objective: float
    sparsity_estimate: int
    support_precision: float
    support_recall: float
    snr_db: float


def mse(x_hat, x_true) -> float:
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = as_vector(x_true, x_hat.size, "x_true")
    d = x_hat - x_true
    return float(d @ d / x_hat.size)


def snr_db(sigma: float) -> float:
    """SNR ``1 / sigma^2`` in decibels."""
    if not sigma > 0:
        raise InputError(f"sigma must be positive, got {sigma}")
    return 10.0 * math.log10(1.0 / sigma**2)


def support_metrics(est, truth) -> tuple[float, float]:
    """Precision and recall of an estimated support; empty sets follow fixed conventions."""
    est, truth = set(np.asarray(est).tolist()), set(np.asarray(truth).tolist())
    hits = len(est & truth)
    if est:
        precision = hits / len(est)
    else:
        precision = 1.0 if not truth else 0.0
    recall = hits / len(truth) if truth else 1.0
    return precision, recall


def evaluate(problem: SensingProblem, x_hat, lam: float) -> Metrics:
    x_hat = np.asarray(x_hat, dtype=float)
    if problem.x_true is None:
        raise InputError("problem has no ground truth")
    est = np.flatnonzero(x_hat)
    precision, recall = support_metrics(est, np.flatnonzero(problem.x_true))
    sigma = problem.sigma_true
    return Metrics(
        mse=mse(x_hat, problem.x_true),
        objective=objective(problem.A, problem.y, x_hat, lam),
        sparsity_estimate=int(est.size),
        support_precision=precision,
        support_recall=recall,
        snr_db=snr_db(sigma) if sigma else math.inf,
    )


def power_iteration(A, rtol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Largest eigenvalue of ``A^T A``, from a fixed all-ones start."""
    A = np.asarray(A, dtype=float)
    v = np.ones(A.shape[1]) / math.sqrt(A.shape[1])
    est = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - est) <= rtol * new:
            return new
        est = new
    return est


def ista_reference(
    problem: SensingProblem, lam: float, iterations: int, record_every: int = 0
):
    """Proximal-gradient LASSO solve with fixed step ``1 / ||A^T A||_2``.

    Starts from zero. When ``record_every > 0`` returns ``(x, objectives)``
    with the objective sampled every ``record_every`` iterations.
    """
    if iterations < 1:
        raise InputError("iterations must be >= 1")
    A, y = problem.A, problem.y
    L = power_iteration(A)
    if L == 0.0:
        x = np.zeros(problem.n)
        return (x, [objective(A, y, x, lam)]) if record_every else x
    t = 1.0 / L
    x = np.zeros(problem.n)
    trace = []
    for i in range(1, iterations + 1):
        grad = A.T @ (A @ x - y)
        x = soft_threshold(x - t * grad, lam * t)
        if record_every and i % record_every == 0:
            trace.append(objective(A, y, x, lam))
    return (x, trace) if record_every else x
