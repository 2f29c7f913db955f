"""Factor system of the Marchaud rough volatility model.

Each factor solves ``dY = h(t) dZ - x Y dt`` with ``h(t) = (1 - e^{-tx})/x``,
which is the factor SDE with the CIR dynamics of Z substituted. Atoms reach
x ~ 1e4, far beyond the explicit Euler stability limit x*dt < 2, so the
linear part is integrated exactly and each cell's dZ is spread linearly:

    Y_{j+1} = e^{-x dt} Y_j + w_j(x) (Z_{j+1} - Z_j),
    w_j(x)  = (1/dt) int_{t_j}^{t_{j+1}} e^{-x (t_{j+1}-s)} h(s) ds
            = h(t_{j+1}) - dt * E2(x dt),   E2(y) = (e^{-y} - 1 + y) / y^2.

This is exact for piecewise-linear Z and unconditionally stable.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma as gamma_fn

from ..errors import DomainError
from ..kernels import TimeGrid
from .params import MarchaudParams
from .rng import block_rng, check_paths, check_seed, run_blocks
from .simulate import cir_block


def _e2(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    small = y < 1e-3
    safe = np.where(small, 1.0, y)
    big = (np.expm1(-safe) + safe) / (safe * safe)
    series = 0.5 - y / 6.0 + y * y / 24.0 - y ** 3 / 120.0
    return np.where(small, series, big)


def h_weight(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """h_x(t) = (1 - e^{-t x}) / x, broadcast over atoms and times."""
    return -np.expm1(-np.multiply.outer(t, x)) / np.asarray(x)[None, :]


def factor_weights(atoms: np.ndarray, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """``(decay, omega)`` with decay shape (a,) and omega shape (n, a)."""
    x = np.asarray(atoms, dtype=float)
    dt = grid.dt
    decay = np.exp(-x * dt)
    omega = h_weight(x, grid.nodes[1:]) - dt * _e2(x * dt)[None, :]
    return decay, np.ascontiguousarray(omega)


def boundary_weight(alpha_m: float, grid: TimeGrid) -> np.ndarray:
    """t^{-alpha-1} / Gamma(-alpha) at every node; node 0 carries no weight."""
    t = grid.nodes
    out = np.zeros_like(t)
    out[1:] = t[1:] ** (-alpha_m - 1.0) / gamma_fn(-alpha_m)
    return out


def _check_quantization(p: MarchaudParams, q) -> None:
    if abs(q.alpha_m - p.alpha_m) > 1e-15:
        raise DomainError(f"quantization built for alpha={q.alpha_m}, model has {p.alpha_m}")


def factor_paths(z: np.ndarray, atoms: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Y^{x_i} driven by Z paths, shape (paths, atoms, n+1)."""
    decay, omega = factor_weights(atoms, grid)
    m, n1 = z.shape
    y = np.zeros((m, decay.shape[0], n1))
    for j in range(n1 - 1):
        dz = (z[:, j + 1] - z[:, j])[:, None]
        y[:, :, j + 1] = y[:, :, j] * decay[None, :] + omega[j][None, :] * dz
    return y


def simulate_marchaud_factors(p: MarchaudParams, q, grid: TimeGrid, n_paths: int, seed: int,
                              threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Z paths (n_paths, n+1) and factor paths (n_paths, n_atoms, n+1)."""
    _check_quantization(p, q)
    n_paths, seed = check_paths(n_paths), check_seed(seed)

    def work(block: int, m: int):
        z = cir_block(block_rng(seed, block), m, grid, p.z0, p.kappa, p.phi_mean, p.sigma)
        return z, factor_paths(z, q.atoms, grid)

    parts = run_blocks(work, n_paths, threads)
    return (np.concatenate([a for a, _ in parts], axis=0),
            np.concatenate([b for _, b in parts], axis=0))
