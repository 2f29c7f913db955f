"""Scalar Riccati-Volterra equations ``f = K*(c0 + c1 f + c2 f^2)``."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .backend import core
from .errors import BlowUpError, DomainError
from .kernels import KernelSpec, TimeGrid, convolve_grid, step_weights

BLOW_UP_CAP = 1e8
N_CORR = 2


@dataclass(frozen=True)
class RiccatiCoefficients:
    c0: float
    c1: float
    c2: float

    def __post_init__(self) -> None:
        for name in ("c0", "c1", "c2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"Riccati coefficient {name} must be finite")
            object.__setattr__(self, name, value)

    def rhs(self, f: np.ndarray) -> np.ndarray:
        return self.c0 + self.c1 * f + self.c2 * f * f


@dataclass(frozen=True)
class RiccatiSolution:
    grid: TimeGrid
    values: np.ndarray
    coeffs: RiccatiCoefficients
    kernel: KernelSpec
    corrector_iters: int = N_CORR
    residual: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def terminal(self) -> float:
        return float(self.values[-1])

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        c = self.coeffs
        buf.write(f"# kernel={self.kernel.describe()} c0={c.c0!r} c1={c.c1!r} c2={c.c2!r} "
                  f"dt={self.grid.dt!r}\n")
        buf.write("t,phi\n")
        for t, v in zip(self.grid.nodes, self.values):
            buf.write(f"{float(t)!r},{float(v)!r}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def tol_riccati(kernel: KernelSpec, dt: float) -> float:
    return 10.0 * dt ** kernel.regularity


def riccati_residual(kernel: KernelSpec, coeffs: RiccatiCoefficients,
                     values: np.ndarray, grid: TimeGrid) -> float:
    """max_j |f_j - (K * rhs(f))(t_j)| with left-node quadrature."""
    conv = convolve_grid(kernel, coeffs.rhs(np.asarray(values)), grid)
    return float(np.max(np.abs(np.asarray(values) - conv)))


def solve_riccati(kernel: KernelSpec, coeffs: RiccatiCoefficients, grid: TimeGrid,
                  n_corr: int = N_CORR, cap: float = BLOW_UP_CAP) -> RiccatiSolution:
    """Product-integration predictor-corrector.

    Each step predicts with left-node weights over all past cells, then
    replaces the newest cell's value ``n_corr`` times with the current guess.

    Raises
    ------
    BlowUpError
        When ``|f_j|`` exceeds ``cap``; carries the last stable node.
    """
    if n_corr < 0:
        raise DomainError("n_corr must be nonnegative")
    values, bad = core.riccati_pc(step_weights(kernel, grid), coeffs.c0, coeffs.c1,
                                  coeffs.c2, int(n_corr), float(cap))
    if bad >= 0:
        last = int(bad) - 1
        raise BlowUpError(
            f"Riccati-Volterra solution exceeded {cap:g} at t={bad * grid.dt:.6g}; "
            f"last stable node t={last * grid.dt:.6g}",
            last, last * grid.dt)
    res = riccati_residual(kernel, coeffs, values, grid)
    return RiccatiSolution(grid, values, coeffs, kernel, int(n_corr), res)


def check_global_existence(kappa: float, sigma: float, a: float) -> bool:
    """kappa^2 - 2 a sigma^2 > 0 (strict)."""
    return kappa * kappa - 2.0 * a * sigma * sigma > 0.0


def trapezoid(values: np.ndarray, dt: float) -> float:
    v = np.asarray(values, dtype=float)
    return float(dt * (0.5 * v[0] + v[1:-1].sum() + 0.5 * v[-1]))


def exponential_moment(heston, a: float, horizon: float | None = None,
                       grid: TimeGrid | None = None, allow_local: bool = False) -> float:
    """E[exp(a * int_0^T V)] for a Volterra Heston variance.

    ``exp(V0 int (a - kappa g + sigma^2 g^2 / 2) + kappa phi int g)`` where g
    solves the Riccati-Volterra equation with coefficients
    ``(a, -kappa, sigma^2/2)``. Outside the global existence region the call
    is refused unless ``allow_local`` is set, in which case a blow-up on the
    grid surfaces as :class:`BlowUpError`.
    """
    if not allow_local and not check_global_existence(heston.kappa, heston.sigma, a):
        raise DomainError(f"kappa^2 - 2 a sigma^2 <= 0 for a={a}; pass allow_local=True "
                          "to attempt the solve on this grid")
    if grid is None:
        if horizon is None:
            raise DomainError("need a grid or a horizon")
        grid = TimeGrid.uniform(horizon, 512)
    elif horizon is not None and abs(grid.horizon - horizon) > 1e-12 * max(1.0, horizon):
        raise DomainError("grid does not end at the requested horizon")
    coeffs = RiccatiCoefficients(a, -heston.kappa, 0.5 * heston.sigma ** 2)
    g = solve_riccati(heston.kernel, coeffs, grid).values
    exponent = heston.v0 * trapezoid(coeffs.rhs(g), grid.dt) \
        + heston.kappa * heston.phi_mean * trapezoid(g, grid.dt)
    return math.exp(exponent)
