"""Pure numpy implementations of the hot loops.

Mirrors ``_core.pyx`` function for function. Arrays are path-major
(``paths x steps``); loops run over time and vectorise across paths.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def toeplitz_conv(omega: np.ndarray, f: np.ndarray) -> np.ndarray:
    """out[j] = sum_{i<j} omega[j-i-1] * f[i], out[0] = 0."""
    omega = np.ascontiguousarray(omega, dtype=float)
    f = np.ascontiguousarray(f, dtype=float)
    n = f.shape[0] - 1
    out = np.zeros(n + 1)
    if n > 0:
        out[1:] = np.convolve(omega[:n], f[:n])[:n]
    return out


def riccati_pc(omega, c0, c1, c2, n_corr, cap):
    """Predictor-corrector for f = K*(c0 + c1 f + c2 f^2).

    Returns ``(values, bad)`` with ``bad = -1`` on success, otherwise the
    first index whose magnitude exceeded ``cap`` (values from there are NaN).
    """
    omega = np.ascontiguousarray(omega, dtype=float)
    n = omega.shape[0]
    f = np.zeros(n + 1)
    rhs = np.zeros(n + 1)
    rhs[0] = c0
    w0 = omega[0]
    for j in range(1, n + 1):
        hist = float(np.dot(omega[j - 1:0:-1], rhs[:j - 1])) if j > 1 else 0.0
        guess = hist + w0 * rhs[j - 1]
        for _ in range(n_corr):
            guess = hist + w0 * (c0 + c1 * guess + c2 * guess * guess)
        if not abs(guess) <= cap:
            f[j:] = np.nan
            return f, j
        f[j] = guess
        rhs[j] = c0 + c1 * guess + c2 * guess * guess
    return f, -1


def volterra_euler(omega, v0, kappa, phi, sigma, dt, db):
    """Full-truncation Euler for V = v0 + K*(kappa(phi - V) dt + sigma sqrt(V) dB)."""
    db = np.ascontiguousarray(db, dtype=float)
    m, n = db.shape
    rev = np.ascontiguousarray(omega[:n][::-1])
    v = np.empty((m, n + 1))
    v[:, 0] = v0
    incr = np.empty((m, n))
    for j in range(n):
        vp = np.maximum(v[:, j], 0.0)
        incr[:, j] = kappa * (phi - vp) + sigma * np.sqrt(vp) * db[:, j] / dt
        acc = incr[:, :j + 1] @ rev[n - j - 1:]
        v[:, j + 1] = np.maximum(v0 + acc, 0.0)
    return v


def volterra_ivi(omega2, k0, g0int, kappa, sigma, normals, uniforms):
    """Integrated-variance steps (dU, dZ) by inverse-Gaussian sampling."""
    normals = np.ascontiguousarray(normals, dtype=float)
    uniforms = np.ascontiguousarray(uniforms, dtype=float)
    m, n = normals.shape
    rev = np.ascontiguousarray(omega2[:n][::-1])
    du = np.zeros((m, n))
    dz = np.zeros((m, n))
    dx = np.zeros((m, n))
    gain = 1.0 + kappa * k0
    for i in range(n):
        a = g0int[i] + (dx[:, :i] @ rev[n - i:] if i else 0.0)
        a = np.maximum(a, 0.0)
        mu = a / gain
        if sigma == 0.0:
            step = mu
            noise = np.zeros(m)
        else:
            y = normals[:, i] ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                shape = (a / (sigma * k0)) ** 2
                ratio = mu / shape
                x = mu * (1.0 - 2.0 * y / (np.sqrt(4.0 * y / ratio + y * y) + y))
                x = np.where(shape > 0.0, x, 0.0)
                pick = uniforms[:, i] * (mu + x) <= mu
                step = np.where(pick | (x <= 0.0), x, mu * mu / x)
            step = np.where(a > 0.0, step, 0.0)
            noise = (gain * step - a) / (sigma * k0)
        du[:, i] = step
        dz[:, i] = noise
        dx[:, i] = -kappa * step + sigma * noise
    return du, dz


def marchaud_nu(z, decay, omega, q, base, nu0):
    """Approximate volatility nu^n from the factor recursion Y' = e^{-x dt} Y + w dZ."""
    z = np.ascontiguousarray(z, dtype=float)
    m, n1 = z.shape
    n = n1 - 1
    nu = np.empty((m, n + 1))
    nu[:, 0] = nu0
    y = np.zeros((m, decay.shape[0]))
    for j in range(n):
        dz = (z[:, j + 1] - z[:, j])[:, None]
        y = y * decay[None, :] + omega[j][None, :] * dz
        nu[:, j + 1] = nu0 + z[:, j + 1] * base[j + 1] + y @ q
    return nu
