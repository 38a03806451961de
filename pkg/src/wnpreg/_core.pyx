# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the specification test and the pair statistic.

Gaussian-kernel only; wnpreg._core_py provides the same interface in
pure numpy (used as fallback and for cross-checking).  Kernel weights
with exponent above EXP_CUT are treated as exactly zero; the numpy
twin applies the identical rule so both backends agree to rounding.
"""

from libc.math cimport exp, sqrt

import numpy as np

EXP_CUT = 45.0

cdef double _EXP_CUT = 45.0
cdef double _INV_SQRT_2PI = 0.3989422804014326779
cdef double _COLLIN_TOL = 1e-10


def ftilde_tstats_gauss(double[::1] xlag, double[::1] y, double[::1] gx,
                        double[::1] r2, double[::1] points,
                        double[::1] gpoints, double[::1] nullvals,
                        double h, double q11):
    """Studentized local-vs-parametric discrepancies at many points.

    Parameters are precomputed arrays: r2 holds squared parametric
    residuals, nullvals the parametric fit at each evaluation point.
    Returns the length-p array of t statistics.  A collinear local
    system (single effective support point) degenerates to the
    local-constant estimate -- the exact limit of the local line as the
    remaining weights vanish; points with no kernel mass at all, or a
    zero local variance, come back as NaN.
    """
    cdef Py_ssize_t T = xlag.shape[0]
    cdef Py_ssize_t P = points.shape[0]
    out = np.empty(P)
    cdef double[::1] t_out = out
    cdef Py_ssize_t j, t
    cdef double x0, g0, u, a, w, z
    cdef double s0, s1, s2, t0, t1, r
    cdef double det, tr, m, sigma2
    cdef double inv_h = 1.0 / h

    for j in range(P):
        x0 = points[j]
        g0 = gpoints[j]
        s0 = s1 = s2 = t0 = t1 = r = 0.0
        for t in range(T):
            u = (xlag[t] - x0) * inv_h
            a = 0.5 * u * u
            if a > _EXP_CUT:
                continue
            w = exp(-a) * _INV_SQRT_2PI
            z = gx[t] - g0
            s0 += w
            s1 += w * z
            s2 += w * z * z
            t0 += w * y[t]
            t1 += w * z * y[t]
            r += w * r2[t]
        if s0 <= 0.0:
            t_out[j] = float("nan")
            continue
        det = s0 * s2 - s1 * s1
        if s2 <= 0.0 or det <= _COLLIN_TOL * s0 * s2:
            # effectively one support point (or collinear): the local line
            # degenerates to the local-constant estimate
            m = t0 / s0
        else:
            m = (s2 * t0 - s1 * t1) / det
        sigma2 = r / s0
        if sigma2 <= 0.0:
            t_out[j] = float("nan")
            continue
        t_out[j] = sqrt(s0 / (sigma2 * q11)) * (m - nullvals[j])
    return out


def wp_sums_gauss(double[::1] x, double[::1] uhat, double h):
    """Off-diagonal pair sums for the residual-based comparison statistic.

    Returns (S, V2) with S = sum_{s != t} u_s u_t K(d_st / h) and
    V2 = 2 sum_{s != t} u_s^2 u_t^2 K(d_st / h)^2 for the Gaussian K.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t s, t
    cdef double acc_s = 0.0, acc_v = 0.0
    cdef double u, a, w, us, xs
    cdef double inv_h = 1.0 / h

    for s in range(n):
        xs = x[s]
        us = uhat[s]
        for t in range(s + 1, n):
            u = (x[t] - xs) * inv_h
            a = 0.5 * u * u
            if a > _EXP_CUT:
                continue
            w = exp(-a) * _INV_SQRT_2PI
            acc_s += us * uhat[t] * w
            acc_v += us * us * uhat[t] * uhat[t] * w * w
    return 2.0 * acc_s, 4.0 * acc_v
