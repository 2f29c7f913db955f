"""Two-parameter Mittag-Leffler function E_{a,b}(x) for real arguments.

Near the origin and on the positive axis the power series is summed directly.
For x < -1 with 0 < a <= 1 the series cancels catastrophically (terms of size
1e20 at x = -10, a = 0.6), so the value is recovered instead from its Laplace
transform ``s^(a-b) / (s^a - x)`` by trapezoidal quadrature on an optimised
Talbot contour. For a <= 1 the transform has no poles off the negative real
axis, which the contour encloses, and 24 nodes give about 1e-13 absolute error.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, rgamma

from ..errors import ConvergenceError, DomainError

SERIES_RADIUS = 1.0
MAX_TERMS = 10_000
TARGET = 1e-10
_TALBOT_NODES = 24


def _series(alpha: float, beta: float, x: float) -> float:
    if x == 0.0:
        return float(rgamma(beta))
    log_abs = math.log(abs(x))
    negative = x < 0.0
    total = 0.0
    largest = 0.0
    for n in range(MAX_TERMS):
        arg = alpha * n + beta
        log_mag = n * log_abs - gammaln(arg)
        if log_mag > 709.0:
            raise ConvergenceError(f"E_{{{alpha},{beta}}}({x}) overflows double precision")
        mag = math.exp(log_mag)
        sign = -1.0 if (negative and n % 2) else 1.0
        term = sign * mag
        total += term
        largest = max(largest, mag)
        if not math.isfinite(total):
            raise ConvergenceError(f"E_{{{alpha},{beta}}}({x}) overflows double precision")
        if n > 0 and mag < 1e-16 * abs(total):
            break
    else:
        raise ConvergenceError(f"series for E_{{{alpha},{beta}}}({x}) did not converge "
                               f"in {MAX_TERMS} terms")
    if negative and largest * 1e-16 * 8 > TARGET:
        raise ConvergenceError(f"series for E_{{{alpha},{beta}}}({x}) loses accuracy to "
                               "cancellation")
    return total


def _talbot(alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    n = _TALBOT_NODES
    k = np.arange(n // 2, n) + 0.5
    theta = -np.pi + k * (2.0 * np.pi / n)
    cot = 1.0 / np.tan(0.6407 * theta)
    z = n * (0.5017 * theta * cot - 0.6122 + 0.2645j * theta)
    dz = n * (0.5017 * cot - 0.5017 * 0.6407 * theta / np.sin(0.6407 * theta) ** 2 + 0.2645j)
    weight = np.exp(z) * z ** (alpha - beta) * dz
    za = z ** alpha
    vals = weight[None, :] / (za[None, :] - x[:, None])
    return (2.0 / n) * vals.imag.sum(axis=1)


def mittag_leffler(alpha: float, beta: float, x: float | np.ndarray) -> float | np.ndarray:
    """E_{alpha,beta}(x) = sum_n x^n / Gamma(alpha n + beta).

    Parameters
    ----------
    alpha, beta : float
        Positive parameters.
    x : float or ndarray
        Real argument(s).

    Raises
    ------
    DomainError
        If ``alpha <= 0`` or ``beta <= 0``.
    ConvergenceError
        If the absolute accuracy target of 1e-10 cannot be met, e.g. on overflow.
    """
    alpha, beta = float(alpha), float(beta)
    if not (math.isfinite(alpha) and math.isfinite(beta)) or alpha <= 0.0 or beta <= 0.0:
        raise DomainError(f"Mittag-Leffler parameters must be positive, got ({alpha}, {beta})")
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("Mittag-Leffler argument is NaN")
    scalar = arr.ndim == 0
    flat = arr.reshape(-1)
    if alpha == 1.0 and beta == 1.0:
        out = np.exp(flat)
        if not np.all(np.isfinite(out)):
            raise ConvergenceError("E_{1,1}(x) overflows double precision")
    else:
        out = np.empty_like(flat)
        contour = (flat < -SERIES_RADIUS) & (alpha <= 1.0)
        if np.any(contour):
            out[contour] = _talbot(alpha, beta, flat[contour])
        for idx in np.flatnonzero(~contour):
            out[idx] = _series(alpha, beta, float(flat[idx]))
    if scalar:
        return float(out[0])
    return out.reshape(arr.shape)
