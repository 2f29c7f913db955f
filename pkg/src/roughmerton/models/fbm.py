"""Exact fractional Brownian motion by Cholesky factorisation."""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.linalg import LinAlgError, cholesky
from threadpoolctl import threadpool_limits

from ..errors import DomainError, NumericalError
from ..kernels import TimeGrid
from .rng import block_rng, check_paths, check_seed, run_blocks

MAX_STEPS = 4096
JITTER = 1e-12


def fbm_covariance(hurst: float, times: np.ndarray) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (t[:, None] ** h2 + t[None, :] ** h2 - np.abs(t[:, None] - t[None, :]) ** h2)


@functools.lru_cache(maxsize=8)
def _factor(hurst: float, dt: float, n: int) -> np.ndarray:
    cov = fbm_covariance(hurst, np.arange(1, n + 1, dtype=float) * dt)
    try:
        lower = cholesky(cov, lower=True, check_finite=False)
    except LinAlgError:
        try:
            lower = cholesky(cov + JITTER * np.eye(n), lower=True, check_finite=False)
        except LinAlgError as exc:
            raise NumericalError(
                f"fBm covariance factorisation failed for H={hurst}, n={n}; use a smaller grid"
            ) from exc
    lower.setflags(write=False)
    return lower


def simulate_fbm(hurst: float, grid: TimeGrid, n_paths: int, seed: int,
                 threads: int | None = None) -> np.ndarray:
    """Paths of W^H on the grid nodes, shape (n_paths, n+1), with W^H_0 = 0."""
    hurst = float(hurst)
    if not (math.isfinite(hurst) and 0.0 < hurst < 1.0):
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    if grid.n_steps > MAX_STEPS:
        raise DomainError(f"dense factorisation limited to {MAX_STEPS} steps, got {grid.n_steps}")
    n_paths, seed = check_paths(n_paths), check_seed(seed)
    n = grid.n_steps
    with threadpool_limits(limits=1, user_api="blas"):
        lower = _factor(hurst, grid.dt, n)

    def work(block: int, m: int) -> np.ndarray:
        z = block_rng(seed, block).standard_normal((m, n))
        out = np.zeros((m, n + 1))
        out[:, 1:] = z @ lower.T
        return out

    return np.concatenate(run_blocks(work, n_paths, threads), axis=0)
