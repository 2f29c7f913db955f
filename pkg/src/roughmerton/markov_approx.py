"""Finite-dimensional Markovian approximation of the Marchaud volatility model.

The volatility

    nu_t = nu0 + Z_t t^{-alpha-1} / Gamma(-alpha) + int_0^inf Y^x_t mu(dx),
    Y^x_t = int_0^t (Z_t - Z_u) e^{-(t-u) x} du,
    mu(dx) = x^{alpha+1} dx / (Gamma(-alpha) Gamma(alpha+1)),

is approximated by quantizing ``mu`` onto cell barycentres ``x_i`` with cell
masses ``q_i``. With zero correlation the optimal holding is constant and the
value is a Feynman-Kac expectation over (Z, Y) paths.

The boundary weight ``t^{-alpha-1}`` is unbounded at 0, so quantities built
from ``nu`` skip the origin: ``nu(t_0)`` is reported as ``nu0`` and the
first time cell ``[0, t_1]`` is integrated with the value at ``t_1``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
from scipy.special import gamma as gamma_fn

from .backend import core
from .distortion import StrategySchedule
from .errors import DomainError, UnsupportedConfigurationError
from .kernels import TimeGrid
from .models.marchaud import boundary_weight, factor_weights, h_weight
from .models.params import MarchaudParams, MarketParams
from .models.rng import block_rng, check_paths, check_seed, mean_and_se, run_blocks
from .models.simulate import cir_block

__all__ = [
    "ApproxValue",
    "ConvergenceTable",
    "LaplaceCheck",
    "Quantization",
    "assemble_approx_vol",
    "build_quantization",
    "convergence_study",
    "feynman_kac_value",
    "h_bounds_hold",
    "laplace_check",
    "mu_tilde_density",
    "optimal_strategy_rho0",
    "quantization_from_partition",
]

SPACINGS = ("geometric", "linear")
XI_MIN = 1e-4
XI_MAX = 1e4


def _check_alpha(alpha_m: float) -> float:
    alpha_m = float(alpha_m)
    if not -1.0 < alpha_m < -0.5:
        raise DomainError(f"alpha_m must lie in (-1, -1/2), got {alpha_m}")
    return alpha_m


def _norm(alpha_m: float) -> float:
    return gamma_fn(-alpha_m) * gamma_fn(alpha_m + 1.0)


def mu_tilde_density(alpha_m: float, x):
    """Density ``x^{alpha+1} / (Gamma(-alpha) Gamma(alpha+1))`` of the mixing measure."""
    alpha_m = _check_alpha(alpha_m)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0.0)) or not np.all(np.isfinite(x_arr)):
        raise DomainError("density is defined for finite x > 0")
    out = x_arr ** (alpha_m + 1.0) / _norm(alpha_m)
    return float(out) if out.ndim == 0 else out


def _power_diff(lo: np.ndarray, hi: np.ndarray, p: float) -> np.ndarray:
    """``hi^p - lo^p`` without cancellation for narrow cells."""
    return lo ** p * np.expm1(p * np.log(hi / lo))


@dataclass(frozen=True)
class Quantization:
    """Atoms and masses of the quantized mixing measure.

    ``partition`` holds the ``n + 1`` knots; atom ``i`` sits at the barycentre
    of cell ``(partition[i], partition[i+1])`` and carries that cell's mass.
    """

    alpha_m: float
    partition: np.ndarray
    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self) -> None:
        for name in ("partition", "atoms", "masses"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.atoms.shape[0]
        if self.masses.shape != (n,) or (n and self.partition.shape != (n + 1,)):
            raise DomainError("partition, atoms and masses have inconsistent lengths")
        if n:
            lo, hi = self.partition[:-1], self.partition[1:]
            if not (np.all(lo < self.atoms) and np.all(self.atoms < hi)):
                raise DomainError("every atom must lie strictly inside its cell")
            if np.any(self.masses <= 0.0):
                raise DomainError("masses must be positive")

    @property
    def n(self) -> int:
        return int(self.atoms.shape[0])

    @classmethod
    def empty(cls, alpha_m: float) -> "Quantization":
        return cls(_check_alpha(alpha_m), np.empty(0), np.empty(0), np.empty(0))

    def refines(self, other: "Quantization", rtol: float = 1e-12) -> bool:
        """True when every knot of ``other`` is also a knot of this partition."""
        if other.n == 0:
            return True
        if self.n == 0:
            return False
        idx = np.searchsorted(self.partition, other.partition)
        idx = np.clip(idx, 0, self.partition.shape[0] - 1)
        near = np.minimum(np.abs(self.partition[idx] - other.partition),
                          np.abs(self.partition[np.maximum(idx - 1, 0)] - other.partition))
        return bool(np.all(near <= rtol * other.partition))

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("i,xi_lo,xi_hi,x_i,q_i\n")
        for i in range(self.n):
            buf.write(f"{i + 1},{float(self.partition[i])!r},{float(self.partition[i + 1])!r},"
                      f"{float(self.atoms[i])!r},{float(self.masses[i])!r}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def quantization_from_partition(alpha_m: float, knots: Sequence[float]) -> Quantization:
    """Barycentres and masses of the mixing measure on the given knots."""
    alpha_m = _check_alpha(alpha_m)
    xi = np.asarray(knots, dtype=float)
    if xi.ndim != 1 or xi.shape[0] < 2:
        raise DomainError("need at least two knots")
    if not np.all(np.isfinite(xi)) or xi[0] <= 0.0 or np.any(np.diff(xi) <= 0.0):
        raise DomainError("knots must be finite, positive and strictly increasing")
    lo, hi = xi[:-1], xi[1:]
    d2 = _power_diff(lo, hi, alpha_m + 2.0)
    d3 = _power_diff(lo, hi, alpha_m + 3.0)
    masses = d2 / ((alpha_m + 2.0) * _norm(alpha_m))
    atoms = (d3 / (alpha_m + 3.0)) / (d2 / (alpha_m + 2.0))
    return Quantization(alpha_m, xi, atoms, masses)


def partition_knots(xi_min: float, xi_max: float, n: int, spacing: str = "geometric") -> np.ndarray:
    """``n + 1`` knots on ``[xi_min, xi_max]``.

    Knot ``i`` depends on ``i / n`` only, so doubling ``n`` reproduces every
    parent knot bit for bit and families are exactly nested.
    """
    xi_min, xi_max = float(xi_min), float(xi_max)
    if not (0.0 < xi_min < xi_max and math.isfinite(xi_max)):
        raise DomainError(f"need 0 < xi_min < xi_max < inf, got [{xi_min}, {xi_max}]")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"atom count must be a positive integer, got {n!r}")
    n = int(n)
    frac = np.array([i / n for i in range(n + 1)])
    if spacing == "geometric":
        knots = xi_min * (xi_max / xi_min) ** frac
    elif spacing == "linear":
        knots = xi_min + (xi_max - xi_min) * frac
    else:
        raise DomainError(f"spacing must be one of {SPACINGS}, got {spacing!r}")
    knots[0], knots[-1] = xi_min, xi_max
    return knots


def build_quantization(alpha_m: float, n: int, xi_min: float = XI_MIN, xi_max: float = XI_MAX,
                       spacing: str = "geometric") -> Quantization:
    """Quantize the mixing measure on ``n`` cells of ``[xi_min, xi_max]``."""
    return quantization_from_partition(alpha_m, partition_knots(xi_min, xi_max, n, spacing))


@dataclass(frozen=True)
class LaplaceCheck:
    discrete: float
    exact: float
    abs_err: float


def laplace_check(q: Quantization, t: float) -> LaplaceCheck:
    """Compare ``sum q_i e^{-t x_i}`` with ``(alpha+1) t^{-alpha-2} / Gamma(-alpha)``."""
    t = float(t)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"t must be positive, got {t}")
    a = q.alpha_m
    discrete = math.fsum((q.masses * np.exp(-t * q.atoms)).tolist())
    exact = (a + 1.0) / gamma_fn(-a) * t ** (-a - 2.0)
    return LaplaceCheck(discrete, exact, abs(discrete - exact))


def h_bounds_hold(q: Quantization, grid: TimeGrid) -> bool:
    """Check ``0 < h_i(t) <= min(t, 1/x_i)`` at every positive node and atom.

    The upper bound is strict in exact arithmetic; once ``t x_i`` exceeds
    about 37, ``1 - e^{-t x_i}`` rounds to 1 and equality is attained.
    """
    if q.n == 0:
        return True
    t = grid.nodes[1:]
    h = h_weight(q.atoms, t)
    bound = np.minimum(t[:, None], 1.0 / q.atoms[None, :])
    return bool(np.all(h > 0.0) and np.all(h <= bound))


def assemble_approx_vol(p: MarchaudParams, q: Quantization, z_paths, y_paths,
                        grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """Approximate volatility ``nu^n`` and variance ``max(nu^n, floor_eps)``.

    ``z_paths`` has shape (paths, n+1) and ``y_paths`` (paths, atoms, n+1).
    """
    z = np.asarray(z_paths, dtype=float)
    y = np.asarray(y_paths, dtype=float)
    n1 = grid.n_steps + 1
    if z.ndim != 2 or z.shape[1] != n1:
        raise DomainError(f"Z paths must have shape (paths, {n1}), got {z.shape}")
    if y.shape != (z.shape[0], q.n, n1):
        raise DomainError(f"factor paths must have shape {(z.shape[0], q.n, n1)}, got {y.shape}")
    if abs(q.alpha_m - p.alpha_m) > 1e-15:
        raise DomainError("quantization and model use different alpha_m")
    nu = p.nu0 + z * boundary_weight(p.alpha_m, grid)[None, :] + np.einsum("pan,a->pn", y, q.masses)
    nu[:, 0] = p.nu0
    return nu, np.maximum(nu, p.floor_eps)


def time_integral(values: np.ndarray, dt: float) -> np.ndarray:
    """``int_0^T`` per row: ``dt f(t_1)`` on the first cell, trapezoid afterwards."""
    v = np.asarray(values, dtype=float)
    if v.shape[-1] < 2:
        raise DomainError("need at least one time step")
    tail = v[..., 1:]
    return dt * v[..., 1] + dt * (0.5 * tail[..., 0] + tail[..., 1:-1].sum(axis=-1) + 0.5 * tail[..., -1])


@dataclass(frozen=True)
class ApproxValue:
    """Monte Carlo value of the quantized problem with ``n`` atoms."""

    n: int
    estimate: float
    std_err: float
    n_paths: int
    seed: int


def _require_rho0(m: MarketParams) -> None:
    if m.rho != 0.0:
        raise UnsupportedConfigurationError(
            f"the Markovian approximation is solved only for zero correlation (rho=0); got rho={m.rho}")


def optimal_strategy_rho0(m: MarketParams, grid: TimeGrid | None = None) -> StrategySchedule:
    """Constant holding ``theta / (1 - gamma)``, tabulated on ``grid``."""
    _require_rho0(m)
    grid = TimeGrid.uniform(m.T, 1) if grid is None else grid
    return StrategySchedule(grid, np.full(grid.n_steps + 1, m.theta / (1.0 - m.gamma_ra)))


def _check_setup(p: MarchaudParams, m: MarketParams, grid: TimeGrid) -> None:
    _require_rho0(m)
    if abs(grid.horizon - m.T) > 1e-12 * max(1.0, m.T):
        raise DomainError(f"grid ends at {grid.horizon}, horizon is {m.T}")


def _fk_samples(p: MarchaudParams, m: MarketParams, qs: Sequence[Quantization], grid: TimeGrid,
                n_paths: int, seed: int, threads: int | None) -> list[np.ndarray]:
    """Per-path exponentials for each quantization, all driven by the same Z paths."""
    g = m.gamma_ra
    coef = g * m.theta ** 2 / (2.0 * (1.0 - g))
    rate = g * m.r * m.T
    base = boundary_weight(p.alpha_m, grid)
    prepared = []
    for q in qs:
        decay, omega = factor_weights(q.atoms, grid)
        prepared.append((decay, omega, np.ascontiguousarray(q.masses)))

    def work(block: int, size: int) -> list[np.ndarray]:
        z = cir_block(block_rng(seed, block), size, grid, p.z0, p.kappa, p.phi_mean, p.sigma)
        out = []
        for decay, omega, masses in prepared:
            nu = core.marchaud_nu(z, decay, omega, masses, base, p.nu0)
            integral = time_integral(np.maximum(nu, p.floor_eps), grid.dt)
            out.append(np.exp(rate + coef * integral))
        return out

    parts = run_blocks(work, n_paths, threads)
    return [np.concatenate([part[k] for part in parts]) for k in range(len(qs))]


def _value(m: MarketParams, q: Quantization, samples: np.ndarray, n_paths: int,
           seed: int) -> ApproxValue:
    scale = m.w0 ** m.gamma_ra / m.gamma_ra
    mean, se = mean_and_se(samples)
    return ApproxValue(q.n, scale * mean, scale * se, n_paths, seed)


def feynman_kac_value(p: MarchaudParams, m: MarketParams, q: Quantization, n_paths: int,
                      seed: int, grid: TimeGrid, threads: int | None = None) -> ApproxValue:
    """Value ``(w0^gamma/gamma) E[exp(int gamma r + gamma theta^2 a(nu^n) / (2(1-gamma)))]``.

    Raises
    ------
    UnsupportedConfigurationError
        If ``m.rho != 0``.
    """
    _check_setup(p, m, grid)
    if abs(q.alpha_m - p.alpha_m) > 1e-15:
        raise DomainError("quantization and model use different alpha_m")
    n_paths, seed = check_paths(n_paths), check_seed(seed)
    (samples,) = _fk_samples(p, m, [q], grid, n_paths, seed, threads)
    return _value(m, q, samples, n_paths, seed)


@dataclass(frozen=True)
class ConvergenceTable:
    """Values for increasing atom counts under common random numbers.

    ``diffs[k]`` is ``estimate[k] - estimate[k-1]`` and ``combined_se[k]``
    is ``sqrt(se[k]^2 + se[k-1]^2)``; both are ``nan`` for the first row.
    """

    rows: tuple[ApproxValue, ...]
    diffs: np.ndarray
    combined_se: np.ndarray

    @property
    def nondecreasing(self) -> bool:
        """No step falls by more than one combined standard error."""
        d, s = self.diffs[1:], self.combined_se[1:]
        return bool(np.all(d >= -s))

    @property
    def stabilizing(self) -> bool:
        """The last step moves by less than two combined standard errors."""
        if len(self.rows) < 2:
            return True
        return bool(abs(self.diffs[-1]) < 2.0 * self.combined_se[-1])

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("n,estimate,std_err,diff\n")
        for row, d in zip(self.rows, self.diffs):
            diff = "" if math.isnan(d) else repr(float(d))
            buf.write(f"{row.n},{row.estimate!r},{row.std_err!r},{diff}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def convergence_study(p: MarchaudParams, m: MarketParams, n_list: Sequence[int], n_paths: int,
                      seed: int, grid: TimeGrid, xi_min: float = XI_MIN, xi_max: float = XI_MAX,
                      spacing: str = "geometric", threads: int | None = None,
                      quantizations: Sequence[Quantization] | None = None) -> ConvergenceTable:
    """Feynman-Kac values for each atom count in ``n_list`` on shared Z paths.

    The partitions must be nested in list order; pass ``quantizations`` to
    supply them directly instead of generating them from ``n_list``.
    """
    _check_setup(p, m, grid)
    n_paths, seed = check_paths(n_paths), check_seed(seed)
    if quantizations is None:
        if not n_list:
            raise DomainError("n_list is empty")
        qs = [build_quantization(p.alpha_m, n, xi_min, xi_max, spacing) for n in n_list]
    else:
        qs = list(quantizations)
        if not qs:
            raise DomainError("no quantizations given")
    for q in qs:
        if abs(q.alpha_m - p.alpha_m) > 1e-15:
            raise DomainError("quantization and model use different alpha_m")
    for coarse, fine in zip(qs, qs[1:]):
        if not fine.refines(coarse):
            raise DomainError(f"partition with {fine.n} atoms does not refine the one with "
                              f"{coarse.n}; convergence needs nested partitions")
    samples = _fk_samples(p, m, qs, grid, n_paths, seed, threads)
    rows = tuple(_value(m, q, s, n_paths, seed) for q, s in zip(qs, samples))
    est = np.array([r.estimate for r in rows])
    se = np.array([r.std_err for r in rows])
    diffs = np.full(len(rows), np.nan)
    comb = np.full(len(rows), np.nan)
    diffs[1:] = np.diff(est)
    comb[1:] = np.hypot(se[1:], se[:-1])
    return ConvergenceTable(rows, diffs, comb)
