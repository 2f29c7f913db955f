"""Parameter bundles for the market and the two variance models."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

from ..errors import DomainError
from ..kernels import KernelSpec


def _real(name: str, value: Any) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(out):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return out


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


@dataclass(frozen=True)
class MarketParams:
    """Bond rate, variance risk premium, correlation, risk aversion, horizon, wealth.

    The stock follows ``dS/S = (r + theta V) dt + sqrt(V) dW1``. Utility is
    ``x^gamma_ra / gamma_ra``.
    """

    r: float
    theta: float
    rho: float
    gamma_ra: float
    T: float
    w0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("r", "theta", "rho", "gamma_ra", "T", "w0"):
            object.__setattr__(self, name, _real(name, getattr(self, name)))
        _check(-1.0 < self.rho < 1.0, f"rho must lie in (-1, 1), got {self.rho}")
        _check(0.0 < self.gamma_ra < 1.0, f"gamma_ra must lie in (0, 1), got {self.gamma_ra}")
        _check(self.T > 0.0, f"T must be positive, got {self.T}")
        _check(self.w0 > 0.0, f"w0 must be positive, got {self.w0}")

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class VolterraHestonParams:
    """``V_t = v0 + int K(t-u) [kappa (phi_mean - V_u) du + sigma sqrt(V_u) dB_u]``."""

    v0: float
    kappa: float
    phi_mean: float
    sigma: float
    kernel: KernelSpec

    def __post_init__(self) -> None:
        for name in ("v0", "kappa", "phi_mean", "sigma"):
            object.__setattr__(self, name, _real(name, getattr(self, name)))
        _check(self.v0 >= 0.0, f"v0 must be nonnegative, got {self.v0}")
        _check(self.kappa > 0.0, f"kappa must be positive, got {self.kappa}")
        _check(self.phi_mean >= 0.0, f"phi_mean must be nonnegative, got {self.phi_mean}")
        _check(self.sigma >= 0.0, f"sigma must be nonnegative, got {self.sigma}")
        _check(isinstance(self.kernel, KernelSpec), "kernel must be a KernelSpec")
        _check(self.kernel.l2_ok,
               f"kernel {self.kernel.describe()} is not locally square integrable "
               "(fractional alpha must exceed 1/2)")

    def to_dict(self) -> dict[str, Any]:
        out = {k: getattr(self, k) for k in ("v0", "kappa", "phi_mean", "sigma")}
        out["kernel"] = self.kernel.to_dict()
        return out


@dataclass(frozen=True)
class MarchaudParams:
    """Rough volatility ``nu`` driven by a CIR factor Z through a Marchaud derivative.

    ``alpha_m`` lies in (-1, -1/2), i.e. Hurst ``H = (alpha_m + 1)/2`` in (0, 1/4).
    """

    nu0: float
    alpha_m: float
    z0: float
    kappa: float
    phi_mean: float
    sigma: float
    floor_eps: float = 1e-6

    def __post_init__(self) -> None:
        for name in ("nu0", "alpha_m", "z0", "kappa", "phi_mean", "sigma", "floor_eps"):
            object.__setattr__(self, name, _real(name, getattr(self, name)))
        _check(self.nu0 > 0.0, f"nu0 must be positive, got {self.nu0}")
        _check(-1.0 < self.alpha_m < -0.5, f"alpha_m must lie in (-1, -1/2), got {self.alpha_m}")
        _check(self.z0 >= 0.0, f"z0 must be nonnegative, got {self.z0}")
        _check(self.kappa > 0.0, f"kappa must be positive, got {self.kappa}")
        _check(self.phi_mean >= 0.0, f"phi_mean must be nonnegative, got {self.phi_mean}")
        _check(self.sigma >= 0.0, f"sigma must be nonnegative, got {self.sigma}")
        _check(self.floor_eps > 0.0, f"floor_eps must be positive, got {self.floor_eps}")

    @property
    def hurst(self) -> float:
        return 0.5 * (self.alpha_m + 1.0)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)
