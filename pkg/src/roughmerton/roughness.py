"""Hurst exponent estimation by moment scaling of log-volatility increments.

For each moment order q and lag D (in samples) the empirical moment

    m(q, D) = mean |x_{t+D} - x_t|^q

is computed over overlapping increments. A log-log fit with intercept gives
the scaling exponent zeta_q per order, and a fit of zeta_q on q through the
origin gives the Hurst estimate H_hat (zeta_q = H q for a self-similar path).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .errors import DegenerateRegressionError, DomainError, InsufficientDataError

__all__ = ["ScalingReport", "estimate_hurst", "fit_scaling", "q_variation"]


def _as_paths(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise DomainError(f"series must be 1-D or 2-D (paths in rows), got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise DomainError("series contains non-finite values")
    return x


def _check_order(q: float) -> float:
    q = float(q)
    if not (math.isfinite(q) and q > 0.0):
        raise DomainError(f"moment order must be positive, got {q}")
    return q


def _check_lag(lag) -> int:
    if isinstance(lag, bool) or int(lag) != lag or lag < 1:
        raise DomainError(f"lag must be a positive integer, got {lag!r}")
    return int(lag)


def _moment(x: np.ndarray, q: float, lag: int) -> float:
    if x.shape[1] <= lag:
        raise InsufficientDataError(f"series of length {x.shape[1]} is too short for lag {lag}")
    inc = np.abs(x[:, lag:] - x[:, :-lag])
    return float(np.mean(inc ** q))


def q_variation(series, q: float, lag: int) -> float:
    """Mean of ``|x_{t+lag} - x_t|^q`` over overlapping increments.

    A 2-D input is treated as independent paths in rows; increments never
    straddle two rows and the mean is pooled over all of them.
    """
    return _moment(_as_paths(series), _check_order(q), _check_lag(lag))


@dataclass(frozen=True)
class ScalingReport:
    """Outcome of the two-stage regression.

    Attributes
    ----------
    qs, lags : ndarray
        Moment orders and lags (in samples).
    m_qd : ndarray
        Empirical moments, shape ``(len(qs), len(lags))``.
    zeta_q : ndarray
        Log-log slope per order.
    intercepts : ndarray
        Log-log intercept per order (``log K_q``).
    H_hat : float
        Slope of ``zeta_q`` against ``q`` through the origin.
    r2 : ndarray
        Coefficient of determination of each per-order fit.
    r2_h : float
        Uncentred coefficient of determination of the second stage.
    """

    qs: np.ndarray
    lags: np.ndarray
    m_qd: np.ndarray
    zeta_q: np.ndarray
    intercepts: np.ndarray
    H_hat: float
    r2: np.ndarray
    r2_h: float

    def fitted(self) -> np.ndarray:
        return np.exp(self.intercepts[:, None] + self.zeta_q[:, None] * np.log(self.lags)[None, :])

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("q,lag,m,fitted\n")
        fit = self.fitted()
        for i, q in enumerate(self.qs):
            for j, lag in enumerate(self.lags):
                buf.write(f"{float(q)!r},{int(lag)},{float(self.m_qd[i, j])!r},{float(fit[i, j])!r}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    def summary(self) -> dict:
        return {
            "H_hat": self.H_hat,
            "r2": {"per_q": [float(v) for v in self.r2], "zeta_fit": self.r2_h},
            "zeta_q": {repr(float(q)): float(z) for q, z in zip(self.qs, self.zeta_q)},
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def fit_scaling(qs: Sequence[float], lags: Sequence[int], m_qd) -> ScalingReport:
    """Run both regressions on a precomputed moment table."""
    qs_a = np.array([_check_order(q) for q in qs])
    lags_a = np.array([_check_lag(d) for d in lags])
    m = np.asarray(m_qd, dtype=float)
    if qs_a.size < 2 or lags_a.size < 3:
        raise InsufficientDataError(f"need at least 2 orders and 3 lags, got {qs_a.size} and {lags_a.size}")
    if m.shape != (qs_a.size, lags_a.size):
        raise DomainError(f"moment table has shape {m.shape}, expected {(qs_a.size, lags_a.size)}")
    if not np.all(np.isfinite(m)) or np.any(m <= 0.0):
        raise DegenerateRegressionError("moments must be positive and finite (constant series?)")

    x = np.log(lags_a.astype(float))
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 0.0:
        raise DegenerateRegressionError("lags have zero spread")
    y = np.log(m)
    yc = y - y.mean(axis=1, keepdims=True)
    zeta = (yc @ xc) / sxx
    intercepts = y.mean(axis=1) - zeta * x.mean()
    resid = yc - zeta[:, None] * xc[None, :]
    ss_tot = np.sum(yc * yc, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(ss_tot > 0.0, 1.0 - np.sum(resid * resid, axis=1) / ss_tot, 1.0)

    h_hat = float(zeta @ qs_a / (qs_a @ qs_a))
    zz = float(zeta @ zeta)
    r2_h = 1.0 - float(np.sum((zeta - h_hat * qs_a) ** 2)) / zz if zz > 0.0 else 1.0
    if not math.isfinite(h_hat):
        raise DegenerateRegressionError("non-finite Hurst estimate")
    return ScalingReport(qs_a, lags_a, m, zeta, intercepts, h_hat, r2, r2_h)


def estimate_hurst(series, qs: Sequence[float] = (0.5, 1.0, 1.5, 2.0, 3.0),
                   lags: Sequence[int] = tuple(range(1, 21))) -> ScalingReport:
    """Estimate the Hurst exponent of a (log-volatility) series.

    Parameters
    ----------
    series : array_like
        One path, or several independent paths stacked in rows.
    qs : sequence of float
        Moment orders, at least two.
    lags : sequence of int
        Lags in samples, at least three distinct values.
    """
    x = _as_paths(series)
    qs = [_check_order(q) for q in qs]
    lags = [_check_lag(d) for d in lags]
    if len(qs) < 2 or len(lags) < 3:
        raise InsufficientDataError(f"need at least 2 orders and 3 lags, got {len(qs)} and {len(lags)}")
    m = np.empty((len(qs), len(lags)))
    for j, lag in enumerate(lags):
        if x.shape[1] <= lag:
            raise InsufficientDataError(f"series of length {x.shape[1]} is too short for lag {lag}")
        inc = np.abs(x[:, lag:] - x[:, :-lag])
        for i, q in enumerate(qs):
            m[i, j] = float(np.mean(inc ** q))
    return fit_scaling(qs, lags, m)
