"""Pure-numpy twin of the compiled inner loops in ``wnpreg._core``.

Same interface and the same weight cutoff rule, so results agree with
the compiled backend up to summation-order rounding.  Also hosts the
generic-kernel variants (any `Kernel`, no cutoff) used when the kernel
is not Gaussian.
"""

from __future__ import annotations

import numpy as np

EXP_CUT = 45.0

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
_COLLIN_TOL = 1e-10


def _gauss_weights(u: np.ndarray) -> np.ndarray:
    a = 0.5 * u * u
    return np.where(a <= EXP_CUT, np.exp(-np.minimum(a, EXP_CUT)), 0.0) * _INV_SQRT_2PI


def _tstats_from_weights(w, y, gx, r2, gpoints, nullvals, q11):
    # w is (P, T); one local 2x2 system per row
    z = gx[None, :] - gpoints[:, None]
    s0 = w.sum(axis=1)
    s1 = (w * z).sum(axis=1)
    s2 = (w * z * z).sum(axis=1)
    t0 = w @ y
    t1 = (w * z) @ y
    r = w @ r2
    det = s0 * s2 - s1 * s1
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (s2 * t0 - s1 * t1) / det
        # a collinear local system degenerates to the local-constant fit
        degen = (s2 <= 0.0) | (det <= _COLLIN_TOL * s0 * s2)
        m = np.where(degen, t0 / s0, m)
        sigma2 = r / s0
        t = np.sqrt(s0 / (sigma2 * q11)) * (m - nullvals)
    bad = (s0 <= 0.0) | (sigma2 <= 0.0)
    t[bad] = np.nan
    return t


def ftilde_tstats_gauss(xlag, y, gx, r2, points, gpoints, nullvals, h, q11):
    """See ``wnpreg._core.ftilde_tstats_gauss``."""
    u = (xlag[None, :] - points[:, None]) / h
    return _tstats_from_weights(_gauss_weights(u), y, gx, r2, gpoints, nullvals, q11)


def ftilde_tstats_kernel(kernel, xlag, y, gx, r2, points, gpoints, nullvals, h, q11):
    """Generic-kernel version of `ftilde_tstats_gauss` (no cutoff)."""
    u = (xlag[None, :] - points[:, None]) / h
    return _tstats_from_weights(kernel(u), y, gx, r2, gpoints, nullvals, q11)


def wp_sums_gauss(x, uhat, h):
    """See ``wnpreg._core.wp_sums_gauss``."""
    n = len(x)
    acc_s = 0.0
    acc_v = 0.0
    u2 = uhat * uhat
    for s in range(n - 1):
        w = _gauss_weights((x[s + 1:] - x[s]) / h)
        acc_s += uhat[s] * float(w @ uhat[s + 1:])
        acc_v += u2[s] * float((w * w) @ u2[s + 1:])
    return 2.0 * acc_s, 4.0 * acc_v


def wp_sums_kernel(kernel, x, uhat, h):
    """Generic-kernel version of `wp_sums_gauss`."""
    n = len(x)
    acc_s = 0.0
    acc_v = 0.0
    u2 = uhat * uhat
    for s in range(n - 1):
        w = kernel((x[s + 1:] - x[s]) / h)
        acc_s += uhat[s] * float(w @ uhat[s + 1:])
        acc_v += u2[s] * float((w * w) @ u2[s + 1:])
    return 2.0 * acc_s, 4.0 * acc_v
