"""Product-integration convolution and second-kind resolvents."""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from scipy.special import gamma as gamma_fn

from ..backend import core
from ..errors import DomainError
from .mittag_leffler import mittag_leffler
from .spec import (
    KernelKind,
    KernelSpec,
    TimeGrid,
    canonical,
    eval_kernel,
    kernel_double_primitive,
    kernel_primitive,
    step_weights,
)


class ResolventSource(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    NUMERICAL = "Numerical"


def tol_res(spec: KernelSpec, dt: float) -> float:
    return 5.0 * dt ** spec.regularity


def convolve_grid(spec: KernelSpec, f, grid: TimeGrid) -> np.ndarray:
    """(K*f)(t_j) with f piecewise constant from the left node of each cell.

    Kernel mass on every cell is integrated exactly, so singular kernels are
    never evaluated at zero. ``out[0] = 0``.
    """
    arr = np.asarray(f, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != grid.n_steps + 1:
        raise DomainError(f"f has shape {arr.shape}, grid needs ({grid.n_steps + 1},)")
    if not np.all(np.isfinite(arr)):
        raise DomainError("f must be finite at every node")
    return core.toeplitz_conv(step_weights(spec, grid), arr)


@dataclass(frozen=True)
class ResolventCurve:
    """R(t_j) on a grid, plus the running integral ``int_0^{t_j} R``.

    ``values[0]`` is ``inf`` for singular kernels.
    """

    grid: TimeGrid
    values: np.ndarray
    source: ResolventSource
    integral: np.ndarray
    spec: KernelSpec = field(compare=False)

    def __post_init__(self) -> None:
        for name in ("values", "integral"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def cell_values(self) -> np.ndarray:
        """Left-node representatives for product integration.

        An infinite ``R(0)`` is replaced by the mean of R over the first cell.
        """
        out = self.values.copy()
        if not np.isfinite(out[0]):
            out[0] = self.integral[1] / self.grid.dt
        return out

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("t,R\n")
        for t, r in zip(self.grid.nodes, self.values):
            buf.write(f"{float(t)!r},{float(r)!r}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def _one_minus_ml(alpha: float, x: np.ndarray) -> np.ndarray:
    return 1.0 - np.asarray(mittag_leffler(alpha, 1.0, x))


def _closed_form(spec: KernelSpec, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = spec.c
    if spec.kind is KernelKind.CONSTANT:
        return c * np.exp(-c * t), -np.expm1(-c * t)
    if spec.kind is KernelKind.EXPONENTIAL:
        rate = spec.lam + c
        return c * np.exp(-spec.lam * t) * np.exp(-c * t), -(c / rate) * np.expm1(-rate * t)
    alpha = spec.alpha
    values = np.empty_like(t)
    values[0] = np.inf
    pos = t[1:]
    values[1:] = c * pos ** (alpha - 1.0) * np.asarray(mittag_leffler(alpha, alpha, -c * pos ** alpha))
    return values, _one_minus_ml(alpha, -c * t ** alpha)


def _gamma_numerical(spec: KernelSpec, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """Solve R = K - K*R node by node.

    The first cell, where R is unbounded, uses its mean from the cell-averaged
    identity ``dt*R0 = P(dt) - R0*P2(dt)``; later nodes use the left-node rule of
    ``convolve_grid`` and are explicit.
    """
    dt, n = grid.dt, grid.n_steps
    t = grid.nodes
    omega = step_weights(spec, grid)
    kvals = np.asarray(eval_kernel(spec, t[1:]))
    p1 = float(kernel_primitive(spec, 0.0, dt))
    p2 = float(kernel_double_primitive(spec, dt))
    rep = np.empty(n + 1)
    rep[0] = p1 / (dt + p2)
    values = np.empty(n + 1)
    values[0] = np.inf
    for j in range(1, n + 1):
        values[j] = kvals[j - 1] - float(np.dot(omega[j - 1::-1], rep[:j]))
        rep[j] = values[j]
    integral = np.empty(n + 1)
    integral[0] = 0.0
    integral[1] = rep[0] * dt
    if n > 1:
        integral[2:] = integral[1] + np.cumsum(0.5 * dt * (values[1:-1] + values[2:]))
    return values, integral


def resolvent_second_kind(spec: KernelSpec, grid: TimeGrid) -> ResolventCurve:
    """Second-kind resolvent R with K*R = K - R.

    Closed forms for Constant, Fractional and Exponential kernels; the Gamma
    kernel is solved numerically.
    """
    work = canonical(spec)
    t = grid.nodes
    if work.kind is KernelKind.GAMMA:
        values, integral = _gamma_numerical(work, grid)
        source = ResolventSource.NUMERICAL
    else:
        values, integral = _closed_form(work, t)
        source = ResolventSource.CLOSED_FORM
    return ResolventCurve(grid, values, source, integral, spec)


def resolvent_scaled(spec: KernelSpec, scale: float, grid: TimeGrid) -> ResolventCurve:
    """Resolvent of ``scale * K``."""
    return resolvent_second_kind(spec.scaled(scale), grid)


def resolvent_residual(curve: ResolventCurve) -> np.ndarray:
    """(K*R)(t_j) - K(t_j) + R(t_j) for j >= 1."""
    spec, grid = curve.spec, curve.grid
    conv = convolve_grid(spec, curve.cell_values(), grid)
    kvals = np.asarray(eval_kernel(spec, grid.nodes[1:]))
    return conv[1:] - kvals + curve.values[1:]


def first_kind_check(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    """Discrete (K*L)(t_j), j >= 1, for a fractional kernel with alpha < 1.

    L has density ``t^(-alpha) / (c Gamma(1-alpha))``; its exact cell masses
    multiply K at each cell midpoint. The exact value is 1 at every node.
    """
    if spec.kind is not KernelKind.FRACTIONAL or spec.alpha >= 1.0:
        raise DomainError("first-kind check needs a fractional kernel with alpha < 1")
    alpha, c = spec.alpha, spec.c
    dt, n = grid.dt, grid.n_steps
    edges = np.arange(n + 1, dtype=float) * dt
    masses = (edges[1:] ** (1.0 - alpha) - edges[:-1] ** (1.0 - alpha)) / (c * gamma_fn(2.0 - alpha))
    mids = (np.arange(n, dtype=float) + 0.5) * dt
    kmid = np.asarray(eval_kernel(spec, mids))
    # (K*L)(t_j) = sum_{i<j} K(t_j - mid_i) * mass_i ; K(t_j - mid_i) = kmid[j-1-i]
    out = np.convolve(kmid, masses)[:n]
    return out
