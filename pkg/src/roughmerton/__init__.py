"""Optimal Merton portfolios under rough Heston models.

Subpackages and modules
-----------------------
kernels        convolution kernels, Mittag-Leffler function, resolvents, quadrature
riccati        Riccati-Volterra solver and exponential moments of integrated variance
models         parameter bundles and Monte Carlo path simulation
roughness      Hurst exponent estimation by moment scaling
distortion     optimal strategy and value for Volterra Heston variance
markov_approx  quantized Marchaud volatility and Feynman-Kac valuation
cli            batch command line front end
"""

from .backend import BACKEND
from .distortion import (
    ConditionReport,
    DistortionSolution,
    check_conditions,
    distortion_power,
    forward_variance,
    martingale_check,
    solve_distortion,
    tilted_lambda,
)
from .errors import (
    BlowUpError,
    ConvergenceError,
    DegenerateRegressionError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    RoughMertonError,
    StagingError,
    UnsupportedConfigurationError,
)
from .kernels import (
    KernelKind,
    KernelSpec,
    ResolventCurve,
    TimeGrid,
    convolve_grid,
    eval_kernel,
    kernel_primitive,
    mittag_leffler,
    resolvent_scaled,
    resolvent_second_kind,
)
from .markov_approx import (
    ApproxValue,
    Quantization,
    assemble_approx_vol,
    build_quantization,
    convergence_study,
    feynman_kac_value,
    laplace_check,
    mu_tilde_density,
    optimal_strategy_rho0,
)
from .models import (
    MarchaudParams,
    MarketParams,
    PathBundle,
    VolterraHestonParams,
    simulate_cir,
    simulate_fbm,
    simulate_marchaud_factors,
    simulate_volterra_heston,
    simulate_wealth,
)
from .riccati import (
    RiccatiCoefficients,
    RiccatiSolution,
    check_global_existence,
    exponential_moment,
    solve_riccati,
)
from .roughness import ScalingReport, estimate_hurst, q_variation

__version__ = "0.1.0"

__all__ = [
    "ApproxValue",
    "BACKEND",
    "BlowUpError",
    "ConditionReport",
    "ConvergenceError",
    "DegenerateRegressionError",
    "DistortionSolution",
    "DomainError",
    "InsufficientDataError",
    "KernelKind",
    "KernelSpec",
    "MarchaudParams",
    "MarketParams",
    "NumericalError",
    "PathBundle",
    "Quantization",
    "ResolventCurve",
    "RiccatiCoefficients",
    "RiccatiSolution",
    "RoughMertonError",
    "ScalingReport",
    "StagingError",
    "TimeGrid",
    "UnsupportedConfigurationError",
    "VolterraHestonParams",
    "assemble_approx_vol",
    "build_quantization",
    "check_conditions",
    "check_global_existence",
    "convergence_study",
    "convolve_grid",
    "distortion_power",
    "estimate_hurst",
    "eval_kernel",
    "exponential_moment",
    "feynman_kac_value",
    "forward_variance",
    "kernel_primitive",
    "laplace_check",
    "martingale_check",
    "mittag_leffler",
    "mu_tilde_density",
    "optimal_strategy_rho0",
    "q_variation",
    "resolvent_scaled",
    "resolvent_second_kind",
    "simulate_cir",
    "simulate_fbm",
    "simulate_marchaud_factors",
    "simulate_volterra_heston",
    "simulate_wealth",
    "solve_distortion",
    "solve_riccati",
    "tilted_lambda",
]
