"""Convolution kernels, Mittag-Leffler function, resolvents and quadrature."""

from .mittag_leffler import mittag_leffler
from .resolvent import (
    ResolventCurve,
    ResolventSource,
    convolve_grid,
    first_kind_check,
    resolvent_residual,
    resolvent_scaled,
    resolvent_second_kind,
    tol_res,
)
from .spec import (
    KernelKind,
    KernelSpec,
    TimeGrid,
    canonical,
    double_step_weights,
    eval_kernel,
    kernel_double_primitive,
    kernel_primitive,
    step_weights,
)

__all__ = [
    "KernelKind",
    "KernelSpec",
    "ResolventCurve",
    "ResolventSource",
    "TimeGrid",
    "canonical",
    "convolve_grid",
    "double_step_weights",
    "eval_kernel",
    "first_kind_check",
    "kernel_double_primitive",
    "kernel_primitive",
    "mittag_leffler",
    "resolvent_residual",
    "resolvent_scaled",
    "resolvent_second_kind",
    "step_weights",
    "tol_res",
]
