"""Convolution kernels, time grids and kernel-exact quadrature weights."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, gammaincc

from ..errors import DomainError

ArrayLike = float | np.ndarray


class KernelKind(str, enum.Enum):
    CONSTANT = "Constant"
    FRACTIONAL = "Fractional"
    EXPONENTIAL = "Exponential"
    GAMMA = "Gamma"

    @classmethod
    def parse(cls, value: "str | KernelKind") -> "KernelKind":
        if isinstance(value, KernelKind):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).strip().lower():
                return kind
        raise DomainError(f"unknown kernel kind {value!r}; expected one of "
                          f"{[k.value for k in cls]}")


def _finite(name: str, value: Any) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(out):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return out


@dataclass(frozen=True)
class KernelSpec:
    """One of the four completely monotone convolution kernels.

    ========== ======================================
    kind       K(t)
    ========== ======================================
    Constant   c
    Fractional c t^(alpha-1) / Gamma(alpha)
    Exponential c exp(-lambda t)
    Gamma      c exp(-lambda t) t^(alpha-1) / Gamma(alpha)
    ========== ======================================

    Parameters are checked on construction, so every instance is admissible.
    """

    kind: KernelKind
    c: float
    alpha: float | None = None
    lam: float | None = None

    def __post_init__(self) -> None:
        kind = KernelKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        c = _finite("c", self.c)
        if c <= 0.0:
            raise DomainError(f"kernel scale c must be positive, got {c}")
        object.__setattr__(self, "c", c)

        needs_alpha = kind in (KernelKind.FRACTIONAL, KernelKind.GAMMA)
        needs_lam = kind in (KernelKind.EXPONENTIAL, KernelKind.GAMMA)
        if needs_alpha:
            if self.alpha is None:
                raise DomainError(f"{kind.value} kernel requires alpha")
            alpha = _finite("alpha", self.alpha)
            if not 0.0 < alpha <= 1.0:
                raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
            object.__setattr__(self, "alpha", alpha)
        elif self.alpha is not None:
            raise DomainError(f"{kind.value} kernel takes no alpha")
        if needs_lam:
            if self.lam is None:
                raise DomainError(f"{kind.value} kernel requires lambda")
            lam = _finite("lambda", self.lam)
            if lam <= 0.0:
                raise DomainError(f"lambda must be positive, got {lam}")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise DomainError(f"{kind.value} kernel takes no lambda")

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: float) -> "KernelSpec":
        return cls(KernelKind.CONSTANT, c)

    @classmethod
    def fractional(cls, c: float, alpha: float) -> "KernelSpec":
        return cls(KernelKind.FRACTIONAL, c, alpha=alpha)

    @classmethod
    def exponential(cls, c: float, lam: float) -> "KernelSpec":
        return cls(KernelKind.EXPONENTIAL, c, lam=lam)

    @classmethod
    def gamma(cls, c: float, alpha: float, lam: float) -> "KernelSpec":
        return cls(KernelKind.GAMMA, c, alpha=alpha, lam=lam)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "KernelSpec":
        allowed = {"kind", "c", "alpha", "lambda"}
        extra = set(data) - allowed
        if extra:
            raise DomainError(f"unknown kernel keys: {sorted(extra)}")
        if "kind" not in data or "c" not in data:
            raise DomainError("kernel needs at least 'kind' and 'c'")
        return cls(data["kind"], data["c"], alpha=data.get("alpha"), lam=data.get("lambda"))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "c": self.c}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.lam is not None:
            out["lambda"] = self.lam
        return out

    # derived ----------------------------------------------------------
    @property
    def l2_ok(self) -> bool:
        """Local square integrability (fails only for rough fractional kernels)."""
        return self.kind is not KernelKind.FRACTIONAL or self.alpha > 0.5

    @property
    def regularity(self) -> float:
        """Exponent governing first-order quadrature error, min(alpha, 1)."""
        return 1.0 if self.alpha is None else min(self.alpha, 1.0)

    @property
    def singular(self) -> bool:
        return self.alpha is not None and self.alpha < 1.0

    def scaled(self, factor: float) -> "KernelSpec":
        """The kernel ``factor * K``."""
        factor = _finite("scale", factor)
        if factor <= 0.0:
            raise DomainError(f"scale must be positive, got {factor}")
        return KernelSpec(self.kind, self.c * factor, alpha=self.alpha, lam=self.lam)

    def describe(self) -> str:
        parts = [f"c={self.c:g}"]
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.lam is not None:
            parts.append(f"lambda={self.lam:g}")
        return f"{self.kind.value}({', '.join(parts)})"


def canonical(spec: KernelSpec) -> KernelSpec:
    """Collapse alpha = 1 onto the smooth kinds so both share code paths."""
    if spec.alpha == 1.0:
        if spec.kind is KernelKind.FRACTIONAL:
            return KernelSpec.constant(spec.c)
        if spec.kind is KernelKind.GAMMA:
            return KernelSpec.exponential(spec.c, spec.lam)
    return spec


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_j = j * dt`` for ``j = 0..n_steps``."""

    dt: float
    n_steps: int

    def __post_init__(self) -> None:
        dt = _finite("dt", self.dt)
        if dt <= 0.0:
            raise DomainError(f"dt must be positive, got {dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps}")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @classmethod
    def uniform(cls, horizon: float, n_steps: int) -> "TimeGrid":
        horizon = _finite("horizon", horizon)
        if horizon <= 0.0:
            raise DomainError(f"horizon must be positive, got {horizon}")
        return cls(horizon / n_steps, n_steps)

    @classmethod
    def from_dt(cls, horizon: float, dt: float) -> "TimeGrid":
        """Grid with step ``dt`` ending exactly at ``horizon``; dt must divide it."""
        horizon, dt = _finite("horizon", horizon), _finite("dt", dt)
        if horizon <= 0.0 or dt <= 0.0:
            raise DomainError("horizon and dt must be positive")
        n = int(round(horizon / dt))
        if n < 1 or abs(n * dt - horizon) > 1e-9 * horizon:
            raise DomainError(f"dt={dt} does not divide horizon {horizon}")
        return cls.uniform(horizon, n)

    @property
    def horizon(self) -> float:
        return self.dt * self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_steps + 1, dtype=float) * self.dt

    def refine(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.dt / factor, self.n_steps * factor)


# ---------------------------------------------------------------------------
# pointwise evaluation

def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def eval_kernel(spec: KernelSpec, t: ArrayLike) -> ArrayLike:
    """K(t). Singular kernels reject t <= 0; every kernel rejects t < 0."""
    arr, scalar = _as_array(t)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError("kernel argument must be finite and nonnegative")
    spec = canonical(spec)
    if spec.singular and np.any(arr <= 0.0):
        raise DomainError(f"{spec.kind.value} kernel with alpha<1 is singular at t=0")
    kind, c = spec.kind, spec.c
    if kind is KernelKind.CONSTANT:
        out = np.full_like(arr, c)
    elif kind is KernelKind.FRACTIONAL:
        out = c * arr ** (spec.alpha - 1.0) / gamma_fn(spec.alpha)
    elif kind is KernelKind.EXPONENTIAL:
        out = c * np.exp(-spec.lam * arr)
    else:
        out = c * np.exp(-spec.lam * arr) * arr ** (spec.alpha - 1.0) / gamma_fn(spec.alpha)
    return float(out) if scalar else out


def _primitive(spec: KernelSpec, t: np.ndarray) -> np.ndarray:
    """P(t) = int_0^t K."""
    kind, c = spec.kind, spec.c
    if kind is KernelKind.CONSTANT:
        return c * t
    if kind is KernelKind.FRACTIONAL:
        return c * t ** spec.alpha / gamma_fn(spec.alpha + 1.0)
    if kind is KernelKind.EXPONENTIAL:
        return -(c / spec.lam) * np.expm1(-spec.lam * t)
    return c * spec.lam ** (-spec.alpha) * gammainc(spec.alpha, spec.lam * t)


def kernel_primitive(spec: KernelSpec, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Exact integral of K over [a, b]."""
    a_arr, sa = _as_array(a)
    b_arr, sb = _as_array(b)
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    if np.any(~np.isfinite(a_arr)) or np.any(~np.isfinite(b_arr)):
        raise DomainError("integration limits must be finite")
    if np.any(a_arr < 0.0):
        raise DomainError("lower limit must be nonnegative")
    if np.any(b_arr < a_arr):
        raise DomainError("upper limit below lower limit")
    spec = canonical(spec)
    kind, c = spec.kind, spec.c
    if kind is KernelKind.CONSTANT:
        out = c * (b_arr - a_arr)
    elif kind is KernelKind.FRACTIONAL:
        out = c * (b_arr ** spec.alpha - a_arr ** spec.alpha) / gamma_fn(spec.alpha + 1.0)
    elif kind is KernelKind.EXPONENTIAL:
        out = (c / spec.lam) * (np.exp(-spec.lam * a_arr) - np.exp(-spec.lam * b_arr))
    else:
        alpha, lam = spec.alpha, spec.lam
        scale = c * lam ** (-alpha)
        lo, hi = lam * a_arr, lam * b_arr
        # upper-tail differences keep relative accuracy far from the origin
        tail = lo >= alpha
        out = np.where(
            tail,
            scale * (gammaincc(alpha, lo) - gammaincc(alpha, hi)),
            scale * (gammainc(alpha, hi) - gammainc(alpha, lo)),
        )
    return float(out) if (sa and sb) else out


def kernel_double_primitive(spec: KernelSpec, t: ArrayLike) -> ArrayLike:
    """int_0^t int_0^s K(u) du ds."""
    arr, scalar = _as_array(t)
    if np.any(arr < 0.0):
        raise DomainError("argument must be nonnegative")
    spec = canonical(spec)
    kind, c = spec.kind, spec.c
    if kind is KernelKind.CONSTANT:
        out = 0.5 * c * arr * arr
    elif kind is KernelKind.FRACTIONAL:
        out = c * arr ** (spec.alpha + 1.0) / gamma_fn(spec.alpha + 2.0)
    elif kind is KernelKind.EXPONENTIAL:
        lam = spec.lam
        out = (c / lam ** 2) * (lam * arr + np.expm1(-lam * arr))
    else:
        alpha, lam = spec.alpha, spec.lam
        x = lam * arr
        out = c * lam ** (-alpha) * (arr * gammainc(alpha, x) - (alpha / lam) * gammainc(alpha + 1.0, x))
    return float(out) if scalar else out


def step_weights(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    """Toeplitz weights ``omega[m-1] = int_{(m-1)dt}^{m dt} K``, m = 1..n_steps.

    On a uniform grid ``w_{j,i} = omega[j-i-1]``.
    """
    m = np.arange(1, grid.n_steps + 1, dtype=float)
    return np.asarray(kernel_primitive(spec, (m - 1.0) * grid.dt, m * grid.dt))


def double_step_weights(spec: KernelSpec, grid: TimeGrid) -> tuple[np.ndarray, float]:
    """Cell-to-cell weights of the double primitive, divided by dt.

    Returns ``(omega2, k0)`` where ``omega2[m-1]`` couples cells m apart and
    ``k0 = P2(dt)/dt`` is the self-interaction of a cell.
    """
    dt, n = grid.dt, grid.n_steps
    p2 = np.asarray(kernel_double_primitive(spec, np.arange(n + 2, dtype=float) * dt))
    omega2 = (p2[2:] - 2.0 * p2[1:-1] + p2[:-2]) / dt
    return omega2, float(p2[1] / dt)
