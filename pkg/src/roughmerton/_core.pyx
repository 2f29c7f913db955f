# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Same contracts as ``_pycore``; per-path loops release the GIL."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, isfinite

cnp.import_array()

NAME = "compiled"


def toeplitz_conv(omega, f):
    cdef const double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0] - 1
    out = np.zeros(n + 1)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc
    with nogil:
        for j in range(1, n + 1):
            acc = 0.0
            for i in range(j):
                acc += w[j - i - 1] * x[i]
            o[j] = acc
    return out


def riccati_pc(omega, double c0, double c1, double c2, int n_corr, double cap):
    cdef const double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    values = np.zeros(n + 1)
    rhs_arr = np.zeros(n + 1)
    cdef double[::1] f = values
    cdef double[::1] rhs = rhs_arr
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t bad = -1
    cdef double hist, guess
    rhs[0] = c0
    with nogil:
        for j in range(1, n + 1):
            hist = 0.0
            for i in range(j - 1):
                hist += w[j - i - 1] * rhs[i]
            guess = hist + w[0] * rhs[j - 1]
            for k in range(n_corr):
                guess = hist + w[0] * (c0 + c1 * guess + c2 * guess * guess)
            if not (fabs(guess) <= cap):
                bad = j
                break
            f[j] = guess
            rhs[j] = c0 + c1 * guess + c2 * guess * guess
    if bad >= 0:
        values[bad:] = np.nan
    return values, bad


def volterra_euler(omega, double v0, double kappa, double phi, double sigma, double dt, db):
    cdef const double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(db, dtype=np.float64)
    cdef Py_ssize_t m = b.shape[0], n = b.shape[1]
    out = np.empty((m, n + 1))
    work = np.empty((m, n))
    cdef double[:, ::1] v = out
    cdef double[:, ::1] incr = work
    cdef Py_ssize_t p, i, j
    cdef double vp, acc
    with nogil:
        for p in range(m):
            v[p, 0] = v0
            for j in range(n):
                vp = v[p, j] if v[p, j] > 0.0 else 0.0
                incr[p, j] = kappa * (phi - vp) + sigma * sqrt(vp) * b[p, j] / dt
                acc = 0.0
                for i in range(j + 1):
                    acc += w[j - i] * incr[p, i]
                acc = v0 + acc
                v[p, j + 1] = acc if acc > 0.0 else 0.0
    return out


def volterra_ivi(omega2, double k0, g0int, double kappa, double sigma, normals, uniforms):
    cdef const double[::1] w = np.ascontiguousarray(omega2, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(g0int, dtype=np.float64)
    cdef const double[:, ::1] nz = np.ascontiguousarray(normals, dtype=np.float64)
    cdef const double[:, ::1] uz = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t m = nz.shape[0], n = nz.shape[1]
    du_arr = np.zeros((m, n))
    dz_arr = np.zeros((m, n))
    dx_arr = np.zeros((m, n))
    cdef double[:, ::1] du = du_arr
    cdef double[:, ::1] dz = dz_arr
    cdef double[:, ::1] dx = dx_arr
    cdef Py_ssize_t p, i, k
    cdef double a, mu, shape, ratio, y, x, step, noise
    cdef double gain = 1.0 + kappa * k0
    with nogil:
        for p in range(m):
            for i in range(n):
                a = g[i]
                for k in range(i):
                    a += w[i - k - 1] * dx[p, k]
                if a <= 0.0:
                    step = 0.0
                    noise = 0.0
                else:
                    mu = a / gain
                    if sigma == 0.0:
                        step = mu
                        noise = 0.0
                    else:
                        shape = (a / (sigma * k0)) * (a / (sigma * k0))
                        y = nz[p, i] * nz[p, i]
                        if shape > 0.0:
                            ratio = mu / shape
                            x = mu * (1.0 - 2.0 * y / (sqrt(4.0 * y / ratio + y * y) + y))
                        else:
                            x = 0.0
                        if uz[p, i] * (mu + x) <= mu or x <= 0.0:
                            step = x
                        else:
                            step = mu * mu / x
                        noise = (gain * step - a) / (sigma * k0)
                du[p, i] = step
                dz[p, i] = noise
                dx[p, i] = -kappa * step + sigma * noise
    return du_arr, dz_arr


def marchaud_nu(z, decay, omega, q, base, double nu0):
    cdef const double[:, ::1] zz = np.ascontiguousarray(z, dtype=np.float64)
    cdef const double[::1] dec = np.ascontiguousarray(decay, dtype=np.float64)
    cdef const double[:, ::1] om = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] qq = np.ascontiguousarray(q, dtype=np.float64)
    cdef const double[::1] bs = np.ascontiguousarray(base, dtype=np.float64)
    cdef Py_ssize_t m = zz.shape[0], n = zz.shape[1] - 1, na = dec.shape[0]
    out = np.empty((m, n + 1))
    ybuf = np.zeros((m, na))
    cdef double[:, ::1] nu = out
    cdef double[:, ::1] y = ybuf
    cdef Py_ssize_t p, j, a
    cdef double d, acc
    with nogil:
        for p in range(m):
            nu[p, 0] = nu0
            for j in range(n):
                d = zz[p, j + 1] - zz[p, j]
                acc = 0.0
                for a in range(na):
                    y[p, a] = y[p, a] * dec[a] + om[j, a] * d
                    acc += y[p, a] * qq[a]
                nu[p, j + 1] = nu0 + zz[p, j + 1] * bs[j + 1] + acc
    return out
