"""Seeded synthetic instances: +-1 spike signals, random sensing matrices, white noise.

Draw order is fixed (support indices, signs, matrix entries row-major, noise)
so that a seed always reproduces the same instance.
"""

from __future__ import annotations

import dataclasses
from typing import Literal

import numpy as np

from .admm import SensingProblem
from .errors import InputError

Ensemble = Literal["orthonormal_rows", "unit_columns"]
ENSEMBLES = ("orthonormal_rows", "unit_columns")


@dataclasses.dataclass(frozen=True)
class SynthSpec:
    m: int
    n: int
    k: int
    sigma: float
    seed: int = 0
    ensemble: Ensemble = "orthonormal_rows"

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InputError("m and n must be positive")
        if not 0 <= self.k <= self.n:
            raise InputError(f"k must lie in [0, n], got k={self.k}, n={self.n}")
        if not self.sigma >= 0:
            raise InputError(f"sigma must be nonnegative, got {self.sigma}")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.ensemble not in ENSEMBLES:
            raise InputError(f"unknown ensemble {self.ensemble!r}")


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for substream ``key`` of master ``seed``.

    Uses ``SeedSequence`` spawn keys, so the stream depends only on
    ``(seed, key)`` and not on how many other streams were created.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def generate_spike_signal(n: int, k: int, rng: np.random.Generator):
    """``k`` entries of +-1 at uniformly random positions, zeros elsewhere.

    Returns ``(x, support)`` with ``support`` sorted and 0-based.
    """
    if not 0 <= k <= n:
        raise InputError(f"k must lie in [0, n], got k={k}, n={n}")
    support = np.sort(rng.choice(n, size=k, replace=False)).astype(np.intp)
    signs = rng.choice(np.array([-1.0, 1.0]), size=k)
    x = np.zeros(n)
    x[support] = signs
    return x, support


def generate_sensing_matrix(
    m: int, n: int, rng: np.random.Generator, ensemble: Ensemble = "orthonormal_rows"
) -> np.ndarray:
    """Gaussian M x N matrix, normalized according to ``ensemble``.

    ``orthonormal_rows``: rows orthonormalized so that ``A A^T = I`` (needs
    ``m <= n``). ``unit_columns``: entries ``N(0, 1/m)`` with each column
    scaled to unit norm.
    """
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    G = rng.standard_normal((m, n)) / np.sqrt(m)
    if ensemble == "unit_columns":
        return G / np.linalg.norm(G, axis=0)
    if ensemble == "orthonormal_rows":
        if m > n:
            raise InputError("orthonormal rows need m <= n")
        Q, R = np.linalg.qr(G.T)
        # fix the QR sign ambiguity so the result is a function of G alone
        d = np.sign(np.diag(R))
        d[d == 0] = 1.0
        return np.ascontiguousarray((Q * d).T)
    raise InputError(f"unknown ensemble {ensemble!r}")


def synthesize(spec: SynthSpec, rng: np.random.Generator | None = None) -> SensingProblem:
    """Build ``y = A x_true + noise``; the instance is fixed by ``spec.seed`` unless ``rng`` is given."""
    if rng is None:
        rng = trial_rng(spec.seed)
    x_true, _ = generate_spike_signal(spec.n, spec.k, rng)
    A = generate_sensing_matrix(spec.m, spec.n, rng, spec.ensemble)
    noise = rng.standard_normal(spec.m)
    y = A @ x_true + spec.sigma * noise
    return SensingProblem(A=A, y=y, x_true=x_true, sigma_true=float(spec.sigma))
