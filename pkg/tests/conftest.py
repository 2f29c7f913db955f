import os

import pytest
from hypothesis import HealthCheck, settings

from roughmerton.kernels import KernelSpec
from roughmerton.models import MarchaudParams, MarketParams, VolterraHestonParams

settings.register_profile(
    "repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

ALL_KERNELS = [
    KernelSpec.constant(1.0),
    KernelSpec.fractional(1.0, 0.6),
    KernelSpec.exponential(1.0, 0.5),
    KernelSpec.gamma(1.0, 0.6, 1.0),
]


@pytest.fixture
def market():
    return MarketParams(r=0.02, theta=1.0, rho=-0.5, gamma_ra=0.5, T=1.0)


@pytest.fixture
def market_rho0():
    return MarketParams(r=0.02, theta=1.0, rho=0.0, gamma_ra=0.5, T=1.0)


@pytest.fixture
def heston_frac():
    return VolterraHestonParams(0.04, 2.0, 0.04, 0.3, KernelSpec.fractional(1.0, 0.6))


@pytest.fixture
def heston_const():
    return VolterraHestonParams(0.04, 2.0, 0.04, 0.3, KernelSpec.constant(1.0))


@pytest.fixture
def marchaud():
    return MarchaudParams(nu0=0.04, alpha_m=-0.75, z0=0.04, kappa=2.0, phi_mean=0.04, sigma=0.3)
