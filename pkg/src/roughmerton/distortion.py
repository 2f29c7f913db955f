"""Optimal power-utility investment under Volterra Heston variance.

The value function factorises as ``J = (w^gamma / gamma) M`` where the
distortion ``M`` is exponential-affine in the forward variance under the
tilted measure. The optimal holding is wealth independent:

    pi*(t) = (theta + rho * delta * sigma * phi(T - t)) / (1 - gamma),

with ``phi`` solving ``phi = K * (g0 - lambda phi + sigma^2 phi^2 / 2)``,
``g0 = gamma theta^2 / (2 delta (1 - gamma))``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence, TextIO

import numpy as np

from .errors import DomainError, StagingError
from .kernels import TimeGrid, resolvent_scaled
from .models.params import MarketParams, VolterraHestonParams
from .models.rng import mean_and_se
from .models.simulate import simulate_volterra_heston, simulate_wealth
from .riccati import RiccatiCoefficients, RiccatiSolution, solve_riccati, trapezoid

__all__ = [
    "A_SCAN",
    "ConditionReport",
    "DistortionSolution",
    "MartingaleCheck",
    "StrategySchedule",
    "check_conditions",
    "default_p",
    "distortion_power",
    "forward_variance",
    "hjb_integrand",
    "martingale_check",
    "solve_distortion",
    "tilted_lambda",
]

A_SCAN = (1.1, 1.5, 2.0, 4.0)


def distortion_power(gamma_ra: float, rho: float) -> float:
    """``delta = (1 - gamma) / (1 - gamma + gamma rho^2)``, in (0, 1]."""
    gamma_ra, rho = float(gamma_ra), float(rho)
    if not 0.0 < gamma_ra < 1.0:
        raise DomainError(f"gamma_ra must lie in (0, 1), got {gamma_ra}")
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho}")
    return (1.0 - gamma_ra) / (1.0 - gamma_ra + gamma_ra * rho * rho)


def _ratio(m: MarketParams) -> float:
    return m.gamma_ra / (1.0 - m.gamma_ra)


def tilted_lambda(m: MarketParams, h: VolterraHestonParams) -> float:
    """Mean reversion under the tilted measure, ``kappa - gamma/(1-gamma) rho theta sigma``."""
    return h.kappa - _ratio(m) * m.rho * m.theta * h.sigma


def default_p(delta: float) -> float:
    return max(1.01, 0.5 / delta + 0.01)


def _check_grid(grid: TimeGrid, horizon: float) -> None:
    if abs(grid.horizon - horizon) > 1e-12 * max(1.0, horizon):
        raise DomainError(f"grid ends at {grid.horizon}, horizon is {horizon}")


def forward_variance(h: VolterraHestonParams, mean_rev: float, mean_level: float,
                     grid: TimeGrid) -> np.ndarray:
    """Forward variance ``E[V_s]`` at the grid nodes for drift ``mean_rev (mean_level - V)``.

    Uses ``xi(s) = V0 (1 - int_0^s R) + mean_level int_0^s R`` with R the
    second-kind resolvent of ``mean_rev * K``.
    """
    mean_rev, mean_level = float(mean_rev), float(mean_level)
    if not (math.isfinite(mean_rev) and mean_rev > 0.0):
        raise DomainError(f"mean reversion must be positive, got {mean_rev}")
    if not math.isfinite(mean_level):
        raise DomainError("mean level must be finite")
    big_r = resolvent_scaled(h.kernel, mean_rev, grid).integral
    return h.v0 * (1.0 - big_r) + mean_level * big_r


@dataclass(frozen=True)
class StrategySchedule:
    """Deterministic holdings ``pi*(t)`` tabulated at the grid nodes.

    Calling the schedule interpolates linearly between nodes.
    """

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < -1e-12) or np.any(t_arr > self.grid.horizon * (1 + 1e-12)):
            raise DomainError("strategy queried outside [0, T]")
        out = np.interp(t_arr, self.grid.nodes, self.values)
        return float(out) if out.ndim == 0 else out

    @property
    def sup_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("t,pi_star\n")
        for t, v in zip(self.grid.nodes, self.values):
            buf.write(f"{float(t)!r},{float(v)!r}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


@dataclass(frozen=True)
class ConditionReport:
    """Integrability conditions, each with the slack it was decided on.

    ``cond1``: ``kappa^2 - 6 (gamma/(1-gamma))^2 theta^2 sigma^2 > 0``;
    ``cond2``: ``lambda > 0``;
    ``cond3``: ``lambda^2 - 2 p gamma/(1-gamma) theta^2 sigma^2 > 0``;
    ``eta_check``: ``kappa^2 - 2 eta(a) sigma^2 > 0`` for the best scanned ``a``.
    """

    cond1: bool
    cond1_slack: float
    cond2: bool
    cond2_slack: float
    cond3: bool
    cond3_slack: float
    p: float
    eta_check: bool
    eta_slack: float
    eta: float
    a_best: float
    sup_abs_A: float
    all_pass: bool

    def to_dict(self) -> dict:
        return asdict(self)


def check_conditions(m: MarketParams, h: VolterraHestonParams,
                     solution: "DistortionSolution | None" = None, p: float | None = None,
                     a_scan: Sequence[float] = A_SCAN) -> ConditionReport:
    """Evaluate the conditions under which the candidate value process is optimal.

    ``sup |A_t|`` is read from the solved strategy, so a solution is required.
    """
    if solution is None:
        raise StagingError("solve the distortion problem before checking its conditions")
    delta = distortion_power(m.gamma_ra, m.rho)
    if p is None:
        p = default_p(delta)
    p = float(p)
    if not p > max(1.0, 0.5 / delta):
        raise DomainError(f"p must exceed max(1, 1/(2 delta)) = {max(1.0, 0.5 / delta):.6g}, got {p}")
    scan = [float(a) for a in a_scan]
    if not scan or any(not (a > 1.0 and math.isfinite(a)) for a in scan):
        raise DomainError("a_scan must be a non-empty list of values > 1")

    ratio = _ratio(m)
    lam = tilted_lambda(m, h)
    th2s2 = m.theta ** 2 * h.sigma ** 2
    s1 = h.kappa ** 2 - 6.0 * ratio ** 2 * th2s2
    s3 = lam ** 2 - 2.0 * p * ratio * th2s2

    sup_a = solution.strategy.sup_abs
    best = None
    for a in scan:
        eta = max(2.0 * a * abs(m.theta) * sup_a, 2.0 * a * (4.0 * a - 1.0) * sup_a ** 2)
        slack = h.kappa ** 2 - 2.0 * eta * h.sigma ** 2
        if best is None or slack > best[0]:
            best = (slack, eta, a)
    s_eta, eta, a_best = best
    flags = (s1 > 0.0, lam > 0.0, s3 > 0.0, s_eta > 0.0)
    return ConditionReport(flags[0], s1, flags[1], lam, flags[2], s3, p, flags[3], s_eta,
                           eta, a_best, sup_a, all(flags))


@dataclass(frozen=True)
class DistortionSolution:
    """Solved distortion problem on a grid.

    Attributes
    ----------
    delta, lambda_tilde : float
        Distortion power and tilted mean reversion.
    phi_curve : RiccatiSolution
        Riccati-Volterra solution ``phi`` on ``[0, T]``.
    xi0_curve : ndarray
        Forward variance under the tilted measure at the grid nodes.
    m0, j0 : float
        Distortion level and value function at time 0.
    strategy : StrategySchedule
        Optimal holdings, independent of wealth.
    conditions : ConditionReport
        Reported, not enforced.
    """

    market: MarketParams
    heston: VolterraHestonParams
    delta: float
    lambda_tilde: float
    phi_curve: RiccatiSolution
    xi0_curve: np.ndarray
    m0: float
    j0: float
    strategy: StrategySchedule
    conditions: ConditionReport | None = None

    @property
    def grid(self) -> TimeGrid:
        return self.phi_curve.grid

    def value_at(self, w0: float) -> float:
        """``J_0`` for another initial wealth; ``m0`` does not depend on it."""
        w0 = float(w0)
        if not w0 > 0.0:
            raise DomainError("initial wealth must be positive")
        g = self.market.gamma_ra
        return w0 ** g / g * self.m0

    def curves_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("t,phi,xi0\n")
        for t, ph, xi in zip(self.grid.nodes, self.phi_curve.values, self.xi0_curve):
            buf.write(f"{float(t)!r},{float(ph)!r},{float(xi)!r}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    def summary(self) -> dict:
        return {
            "delta": self.delta,
            "lambda": self.lambda_tilde,
            "m0": self.m0,
            "j0": self.j0,
            "conditions": None if self.conditions is None else self.conditions.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _rate_integral(m: MarketParams, grid: TimeGrid, rate_curve) -> float:
    if rate_curve is None:
        return m.r * grid.horizon
    r = np.asarray(rate_curve, dtype=float)
    if r.shape != (grid.n_steps + 1,):
        raise DomainError(f"rate curve needs {grid.n_steps + 1} node values, got {r.shape}")
    if not np.all(np.isfinite(r)):
        raise DomainError("rate curve must be finite")
    return trapezoid(r, grid.dt)


def solve_distortion(m: MarketParams, h: VolterraHestonParams, grid: TimeGrid,
                     rate_curve=None, p: float | None = None,
                     a_scan: Sequence[float] = A_SCAN) -> DistortionSolution:
    """Distortion power, Riccati curve, tilted forward variance, ``m0``, ``j0`` and ``pi*``.

    Parameters
    ----------
    rate_curve : array_like, optional
        Short rate at every grid node; defaults to the constant ``m.r``. It
        only enters ``m0`` through ``int gamma r``.
    p, a_scan
        Forwarded to :func:`check_conditions`. Conditions are reported on the
        result and never enforced.
    """
    _check_grid(grid, m.T)
    g = m.gamma_ra
    delta = distortion_power(g, m.rho)
    lam = tilted_lambda(m, h)
    if lam <= 0.0:
        raise DomainError(f"tilted mean reversion lambda={lam:.6g} is not positive")
    c0 = g * m.theta ** 2 / (2.0 * delta * (1.0 - g))
    phi = solve_riccati(h.kernel, RiccatiCoefficients(c0, -lam, 0.5 * h.sigma ** 2), grid)
    xi = forward_variance(h, lam, h.kappa * h.phi_mean / lam, grid)
    phi_rev = phi.values[::-1]

    integrand = (g * m.theta ** 2 / (2.0 * (1.0 - g))) * xi \
        + 0.5 * delta * h.sigma ** 2 * xi * phi_rev ** 2
    exponent = g * _rate_integral(m, grid, rate_curve) + trapezoid(integrand, grid.dt)
    m0 = math.exp(exponent)
    j0 = m.w0 ** g / g * m0
    strategy = StrategySchedule(grid, (m.theta + m.rho * delta * h.sigma * phi_rev) / (1.0 - g))
    sol = DistortionSolution(m, h, delta, lam, phi, xi, m0, j0, strategy)
    report = check_conditions(m, h, sol, p, a_scan)
    return DistortionSolution(m, h, delta, lam, phi, xi, m0, j0, strategy, report)


def hjb_integrand(pi, t: float, v, solution: DistortionSolution):
    """Pointwise drift ``F(pi, t)`` of the candidate value process.

    The martingale part ``U1 / M`` of the distortion is replaced by its value
    ``rho delta sigma phi(T - t) sqrt(V)`` along the solution, which makes
    ``pi*(t)`` the unique maximiser with ``F(pi*) = 0``.
    """
    m, h = solution.market, solution.heston
    g = m.gamma_ra
    root = np.sqrt(np.maximum(np.asarray(v, dtype=float), 0.0))
    phi_back = np.interp(m.T - float(t), solution.grid.nodes, solution.phi_curve.values)
    drift = m.theta * root + m.rho * solution.delta * h.sigma * phi_back * root
    pi = np.asarray(pi, dtype=float)
    return (pi * pi * g * (g - 1.0) / 2.0 * root ** 2 + pi * drift * g * root
            - g / (2.0 * (1.0 - g)) * drift ** 2)


@dataclass(frozen=True)
class MartingaleCheck:
    """Simulated expected utility of the optimal and two perturbed strategies.

    ``consistent`` holds when the optimal strategy reproduces ``j0`` within
    ``n_se`` standard errors and neither perturbation beats ``j0`` by more.
    """

    j0: float
    utilities: dict
    n_se: float
    n_paths: int
    seed: int
    scheme: str

    @property
    def consistent(self) -> bool:
        mean, se = self.utilities["optimal"]
        ok = abs(mean - self.j0) <= self.n_se * se
        for name in ("zero", "double"):
            mean, se = self.utilities[name]
            ok = ok and mean <= self.j0 + self.n_se * se
        return bool(ok)

    def to_dict(self) -> dict:
        return {
            "j0": self.j0,
            "utilities": {k: {"mean": v[0], "std_err": v[1]} for k, v in self.utilities.items()},
            "n_se": self.n_se,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "scheme": self.scheme,
            "consistent": self.consistent,
        }


def martingale_check(solution: DistortionSolution, n_paths: int, seed: int,
                     grid: TimeGrid | None = None, scheme: str | None = None,
                     threads: int | None = None, n_se: float = 3.0) -> MartingaleCheck:
    """Monte Carlo expected utility of ``pi*``, ``0`` and ``2 pi*`` against ``j0``.

    All three strategies share one set of variance paths. The default scheme
    is ``ivi`` for singular kernels and ``euler`` otherwise; the default grid
    has 256 steps.
    """
    m, h = solution.market, solution.heston
    grid = TimeGrid.uniform(m.T, 256) if grid is None else grid
    _check_grid(grid, m.T)
    if scheme is None:
        scheme = "ivi" if h.kernel.singular else "euler"
    bundle = simulate_volterra_heston(h, m, grid, n_paths, seed, scheme=scheme, threads=threads)
    g = m.gamma_ra
    pi_star = solution.strategy(grid.nodes[:-1])
    utilities = {}
    for name, strat in (("optimal", pi_star), ("zero", 0.0), ("double", 2.0 * pi_star)):
        wealth = simulate_wealth(bundle, m, strat).wealth[:, -1]
        utilities[name] = mean_and_se(wealth ** g / g)
    return MartingaleCheck(solution.j0, utilities, float(n_se), bundle.n_paths, bundle.seed, scheme)
