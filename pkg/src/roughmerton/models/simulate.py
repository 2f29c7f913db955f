"""Monte Carlo simulators: CIR factor, Volterra Heston variance, stock and wealth."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from ..backend import core
from ..errors import DomainError
from ..kernels import (
    TimeGrid,
    double_step_weights,
    kernel_double_primitive,
    step_weights,
)
from .bundle import PathBundle
from .params import MarchaudParams, MarketParams, VolterraHestonParams
from .rng import BLOCK_SIZE, block_rng, check_paths, check_seed, normals, run_blocks

SCHEMES = ("euler", "ivi")
Strategy = float | Sequence[float] | np.ndarray | Callable[[np.ndarray], np.ndarray]


def _check_antithetic(n_paths: int, antithetic: bool) -> None:
    if antithetic and (n_paths % 2 or BLOCK_SIZE % 2):
        raise DomainError("antithetic sampling needs an even number of paths")


# ---------------------------------------------------------------------------
# CIR

def _cir_params(p) -> tuple[float, float, float, float]:
    if isinstance(p, MarchaudParams):
        return p.z0, p.kappa, p.phi_mean, p.sigma
    try:
        z0, kappa, phi, sigma = (float(x) for x in p)
    except (TypeError, ValueError) as exc:
        raise DomainError("CIR parameters must be MarchaudParams or (z0, kappa, phi, sigma)") from exc
    if min(z0, phi, sigma) < 0.0 or kappa <= 0.0 or not all(map(math.isfinite, (z0, kappa, phi, sigma))):
        raise DomainError("CIR parameters need z0, phi, sigma >= 0 and kappa > 0")
    return z0, kappa, phi, sigma


def cir_block(rng: np.random.Generator, m: int, grid: TimeGrid, z0: float, kappa: float,
              phi: float, sigma: float, antithetic: bool = False) -> np.ndarray:
    """Full-truncation Euler for one block; returns Z of shape (m, n+1)."""
    n, dt = grid.n_steps, grid.dt
    db = normals(rng, m, n, antithetic) * math.sqrt(dt)
    z = np.empty((m, n + 1))
    z[:, 0] = z0
    for j in range(n):
        zp = np.maximum(z[:, j], 0.0)
        z[:, j + 1] = np.maximum(z[:, j] + kappa * (phi - zp) * dt + sigma * np.sqrt(zp) * db[:, j], 0.0)
    return z


def simulate_cir(p, grid: TimeGrid, n_paths: int, seed: int, antithetic: bool = False,
                 threads: int | None = None) -> np.ndarray:
    """CIR paths ``dZ = kappa (phi - Z) dt + sigma sqrt(Z) dB``, shape (n_paths, n+1)."""
    z0, kappa, phi, sigma = _cir_params(p)
    n_paths, seed = check_paths(n_paths), check_seed(seed)
    _check_antithetic(n_paths, antithetic)

    def work(block: int, m: int) -> np.ndarray:
        return cir_block(block_rng(seed, block), m, grid, z0, kappa, phi, sigma, antithetic)

    return np.concatenate(run_blocks(work, n_paths, threads), axis=0)


# ---------------------------------------------------------------------------
# Volterra Heston

def _log_stock(m: MarketParams, dt: float, iv: np.ndarray, sdw1: np.ndarray) -> np.ndarray:
    steps = m.r * dt + (m.theta - 0.5) * iv + sdw1
    out = np.zeros((iv.shape[0], iv.shape[1] + 1))
    np.cumsum(steps, axis=1, out=out[:, 1:])
    return np.exp(out)


def _euler_block(h: VolterraHestonParams, m: MarketParams, grid: TimeGrid, omega: np.ndarray,
                 seed: int, block: int, size: int, antithetic: bool):
    rng = block_rng(seed, block)
    n, dt = grid.n_steps, grid.dt
    root = math.sqrt(dt)
    w1 = normals(rng, size, n, antithetic) * root
    w2 = normals(rng, size, n, antithetic) * root
    db = m.rho * w1 + math.sqrt(1.0 - m.rho ** 2) * w2
    v = core.volterra_euler(omega, h.v0, h.kappa, h.phi_mean, h.sigma, dt, db)
    vp = v[:, :-1]
    iv = vp * dt
    sdw1 = np.sqrt(vp) * w1
    return v, iv, sdw1, w1, w2


def _ivi_block(h: VolterraHestonParams, m: MarketParams, grid: TimeGrid, omega: np.ndarray,
               omega2: np.ndarray, k0: float, g0int: np.ndarray, seed: int, block: int, size: int):
    rng = block_rng(seed, block)
    n, dt = grid.n_steps, grid.dt
    z_ig = rng.standard_normal((size, n))
    u_ig = rng.random((size, n))
    z_perp = rng.standard_normal((size, n))
    du, dz = core.volterra_ivi(omega2, k0, g0int, h.kappa, h.sigma, z_ig, u_ig)
    incr = h.kappa * h.phi_mean - h.kappa * du / dt + h.sigma * dz / dt
    v = np.empty((size, n + 1))
    v[:, 0] = h.v0
    v[:, 1:] = h.v0 + fftconvolve(incr, omega[None, :], axes=1)[:, :n]
    np.maximum(v, 0.0, out=v)
    sdw1 = m.rho * dz + math.sqrt(1.0 - m.rho ** 2) * np.sqrt(du) * z_perp
    return v, du, sdw1


def simulate_volterra_heston(h: VolterraHestonParams, m: MarketParams, grid: TimeGrid,
                             n_paths: int, seed: int, scheme: str = "euler",
                             antithetic: bool = False, threads: int | None = None) -> PathBundle:
    """Simulate variance and stock paths.

    ``scheme="euler"``: full-truncation Euler on the Volterra equation with
    kernel-exact weights on every drift and diffusion increment, V clamped at 0.

    ``scheme="ivi"``: per cell, samples the integrated variance ``dU`` from an
    inverse Gaussian law and recovers the martingale increment
    ``dZ = int sqrt(V) dB`` from it; positivity holds by construction. Prefer
    it for rough kernels with large vol-of-vol, where Euler truncation biases
    the mean upward. Node values ``V`` are then reconstructed from the
    increments (and clamped) for diagnostics; the stock uses ``dU`` directly.
    """
    if scheme not in SCHEMES:
        raise DomainError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    n_paths, seed = check_paths(n_paths), check_seed(seed)
    _check_antithetic(n_paths, antithetic)
    if scheme == "ivi" and antithetic:
        raise DomainError("antithetic sampling is only available for the euler scheme")
    omega = step_weights(h.kernel, grid)
    dt, n = grid.dt, grid.n_steps

    if scheme == "euler":
        def work(block: int, size: int):
            return _euler_block(h, m, grid, omega, seed, block, size, antithetic)
    else:
        omega2, k0 = double_step_weights(h.kernel, grid)
        p2 = np.asarray(kernel_double_primitive(h.kernel, grid.nodes))
        g0int = h.v0 * dt + h.kappa * h.phi_mean * np.diff(p2)

        def work(block: int, size: int):
            return _ivi_block(h, m, grid, omega, omega2, k0, g0int, seed, block, size)

    parts = run_blocks(work, n_paths, threads)
    v = np.concatenate([p[0] for p in parts], axis=0)
    iv = np.concatenate([p[1] for p in parts], axis=0)
    sdw1 = np.concatenate([p[2] for p in parts], axis=0)
    w1 = w2 = None
    if scheme == "euler":
        w1 = np.concatenate([p[3] for p in parts], axis=0)
        w2 = np.concatenate([p[4] for p in parts], axis=0)
    s = _log_stock(m, dt, iv, sdw1)
    return PathBundle(grid=grid, n_paths=n_paths, seed=seed, v=v, s=s, iv=iv, sdw1=sdw1,
                      w1=w1, w2=w2, scheme=scheme, antithetic=antithetic, rho=m.rho)


# ---------------------------------------------------------------------------
# wealth

def strategy_values(strategy: Strategy, grid: TimeGrid) -> np.ndarray:
    """Holdings ``pi(t_j)`` on the left node of every cell, j = 0..n-1."""
    n = grid.n_steps
    if callable(strategy):
        vals = np.asarray(strategy(grid.nodes[:-1]), dtype=float)
        if vals.ndim == 0:
            vals = np.full(n, float(vals))
    else:
        vals = np.asarray(strategy, dtype=float)
        if vals.ndim == 0:
            vals = np.full(n, float(vals))
        elif vals.shape[0] == n + 1:
            vals = vals[:-1]
    if vals.shape != (n,):
        raise DomainError(f"strategy covers {vals.shape} nodes, grid needs {n} or {n + 1}")
    if not np.all(np.isfinite(vals)):
        raise DomainError("strategy values must be finite")
    return vals


def simulate_wealth(bundle: PathBundle, m: MarketParams, strategy: Strategy) -> PathBundle:
    """Log-Euler wealth for ``dPi/Pi = (r + theta pi V) dt + pi sqrt(V) dW1``; Pi_0 = w0."""
    if bundle.iv is None or bundle.sdw1 is None:
        raise DomainError("bundle lacks variance increments")
    pi = strategy_values(strategy, bundle.grid)[None, :]
    steps = m.r * bundle.grid.dt + (m.theta * pi - 0.5 * pi * pi) * bundle.iv + pi * bundle.sdw1
    log_w = np.empty((bundle.n_paths, bundle.grid.n_steps + 1))
    log_w[:, 0] = math.log(m.w0)
    np.cumsum(steps, axis=1, out=log_w[:, 1:])
    log_w[:, 1:] += math.log(m.w0)
    return bundle.with_wealth(np.exp(log_w))
