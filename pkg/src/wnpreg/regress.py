"""Parametric and kernel-local regression estimators.

All estimators regress a response ``y = (y_2, ..., y_n)`` on the lagged
regressor ``xlag = (x_1, ..., x_{n-1})``, possibly through a known
transformation ``g``.  The parametric null model is

    y_t = mu + gamma * g(x_{t-1}) + u_t.

Local estimators weight observations by K((x_{t-1} - x0)/h) and come in
three flavours: Nadaraya-Watson (`nw`), local linear in the regressor
(`loclin`), and local linear in g(x) - g(x0) (`local_g`), whose
intercept estimates the regression function at x0 with zero bias when
the parametric null holds.

`np_tstat_fit` is the studentized discrepancy between the local and the
parametric fit at a point; summing its square over quantile points is
the basis of the specification test in `wnpreg.spectest`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel

__all__ = [
    "GFunction",
    "IDENTITY",
    "SQUARE",
    "SIGN",
    "ParametricFit",
    "LocalFit",
    "TStat",
    "LocalFitError",
    "ols_fit",
    "nw",
    "loclin",
    "local_g",
    "local_sigma2",
    "np_tstat_m0",
    "np_tstat_fit",
]

# determinant ratio below which a 2x2 local system counts as collinear
# (det/(S0*S2) = 1 - corr^2 by Cauchy-Schwarz, so this is scale-free)
_COLLIN_TOL = 1e-10
# threshold for a numerically constant parametric regressor
_SING_TOL = 1e-12


class LocalFitError(ValueError):
    """Raised when a local fit is degenerate (no kernel mass / singular)."""


@dataclass(frozen=True)
class GFunction:
    """A known regressor transformation g with a printable name."""

    name: str
    fn: callable

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


IDENTITY = GFunction("identity", lambda x: x)
SQUARE = GFunction("square", lambda x: x * x)
SIGN = GFunction("sign", lambda x: (x > 0).astype(float))


@dataclass
class ParametricFit:
    """Least-squares fit of y on (1, g(x)) with classical standard errors."""

    mu: float
    gamma: float
    se_mu: float
    se_gamma: float
    t_mu: float
    t_gamma: float
    sigma2: float
    nobs: int

    def predict(self, gx: np.ndarray) -> np.ndarray:
        return self.mu + self.gamma * np.asarray(gx)


@dataclass
class LocalFit:
    """A kernel-local fit at a single point."""

    value: float        # estimated regression level at x0
    slope: float        # local slope (nan for Nadaraya-Watson)
    mass: float         # total kernel weight sum_t K((x_{t-1}-x0)/h)
    x0: float
    h: float


@dataclass
class TStat:
    """A studentized local discrepancy."""

    t: float
    estimate: float
    null_value: float
    sigma2: float
    mass: float


def _as_xy(y, xlag):
    y = np.asarray(y, dtype=float)
    xlag = np.asarray(xlag, dtype=float)
    if y.shape != xlag.shape or y.ndim != 1:
        raise ValueError("y and xlag must be 1-d arrays of equal length")
    if len(y) < 3:
        raise ValueError("need at least 3 observations")
    return y, xlag


def ols_fit(y, xlag, g: GFunction = IDENTITY,
            mu0: float = 0.0, gamma0: float = 0.0) -> ParametricFit:
    """OLS of y on (1, g(xlag)); t statistics test mu = mu0, gamma = gamma0.

    The 2x2 normal equations are solved in centered form; the error
    variance uses the T - 2 degrees-of-freedom divisor.
    """
    y, xlag = _as_xy(y, xlag)
    gx = g(xlag)
    T = len(y)
    gbar = gx.mean()
    ybar = y.mean()
    zg = gx - gbar
    s_gg = float(zg @ zg)
    if s_gg <= _SING_TOL * T * max(1.0, gbar * gbar):
        raise LocalFitError("regressor g(x) is (numerically) constant")
    gamma = float(zg @ (y - ybar)) / s_gg
    mu = ybar - gamma * gbar
    resid = y - mu - gamma * gx
    sigma2 = float(resid @ resid) / (T - 2)
    se_gamma = np.sqrt(sigma2 / s_gg)
    se_mu = np.sqrt(sigma2 * (1.0 / T + gbar * gbar / s_gg))
    return ParametricFit(
        mu=mu, gamma=gamma, se_mu=float(se_mu), se_gamma=float(se_gamma),
        t_mu=float((mu - mu0) / se_mu), t_gamma=float((gamma - gamma0) / se_gamma),
        sigma2=sigma2, nobs=T)


def _weights(kernel: Kernel, xlag, x0: float, h: float) -> np.ndarray:
    if h <= 0:
        raise ValueError("bandwidth h must be positive")
    return kernel((xlag - x0) / h)


def nw(y, xlag, x0: float, h: float, kernel: Kernel) -> LocalFit:
    """Nadaraya-Watson level estimate at x0."""
    y, xlag = _as_xy(y, xlag)
    w = _weights(kernel, xlag, x0, h)
    mass = float(w.sum())
    if mass <= 0.0:
        raise LocalFitError(f"no kernel mass at x0={x0:g} (h={h:g})")
    return LocalFit(float(w @ y) / mass, np.nan, mass, x0, h)


def local_g(y, xlag, g: GFunction, x0: float, h: float, kernel: Kernel) -> LocalFit:
    """Weighted LS of y on (1, g(xlag) - g(x0)); intercept estimates m(x0).

    Centering in g makes the intercept unbiased for mu + gamma g(x0)
    under the parametric null regardless of the local design.
    """
    y, xlag = _as_xy(y, xlag)
    w = _weights(kernel, xlag, x0, h)
    z = g(xlag) - float(g(x0))
    s0 = float(w.sum())
    s1 = float(w @ z)
    s2 = float(w @ (z * z))
    t0 = float(w @ y)
    t1 = float(w @ (z * y))
    if s0 <= 0.0:
        raise LocalFitError(f"no kernel mass at x0={x0:g} (h={h:g})")
    det = s0 * s2 - s1 * s1
    if s2 <= 0.0 or det <= _COLLIN_TOL * s0 * s2:
        raise LocalFitError(f"collinear local system at x0={x0:g} (h={h:g})")
    value = (s2 * t0 - s1 * t1) / det
    slope = (s0 * t1 - s1 * t0) / det
    return LocalFit(float(value), float(slope), s0, x0, h)


def loclin(y, xlag, x0: float, h: float, kernel: Kernel) -> LocalFit:
    """Local linear fit in the regressor itself."""
    return local_g(y, xlag, IDENTITY, x0, h, kernel)


def local_sigma2(y, xlag, g: GFunction, x0: float, h: float, kernel: Kernel,
                 mu: float, gamma: float) -> float:
    """Kernel-weighted mean of squared parametric residuals at x0."""
    y, xlag = _as_xy(y, xlag)
    w = _weights(kernel, xlag, x0, h)
    mass = float(w.sum())
    if mass <= 0.0:
        raise LocalFitError(f"no kernel mass at x0={x0:g} (h={h:g})")
    r = y - mu - gamma * g(xlag)
    return float(w @ (r * r)) / mass


def np_tstat_m0(y, xlag, x0: float, h: float, kernel: Kernel, m0: float) -> TStat:
    """Studentized local-linear test of m(x0) = m0.

    The local variance uses residuals from the local line itself, so the
    statistic is asymptotically N(0, 1) without parametric input.
    """
    y, xlag = _as_xy(y, xlag)
    fit = loclin(y, xlag, x0, h, kernel)
    w = _weights(kernel, xlag, x0, h)
    r = y - (fit.value + fit.slope * (xlag - x0))
    sigma2 = float(w @ (r * r)) / fit.mass
    if sigma2 <= 0.0:
        raise LocalFitError(f"zero local variance at x0={x0:g}")
    t = np.sqrt(fit.mass / (sigma2 * kernel.q11)) * (fit.value - m0)
    return TStat(float(t), fit.value, m0, sigma2, fit.mass)


def np_tstat_fit(y, xlag, g: GFunction, x0: float, h: float, kernel: Kernel,
                 fit: ParametricFit) -> TStat:
    """Studentized discrepancy between `local_g` and a parametric fit at x0.

    The local variance uses squared parametric residuals weighted at x0.
    """
    y, xlag = _as_xy(y, xlag)
    try:
        lf = local_g(y, xlag, g, x0, h, kernel)
    except LocalFitError:
        # collinear local system: the local line degenerates to the
        # local-constant estimate (its limit as satellite weights vanish)
        lf = nw(y, xlag, x0, h, kernel)
    sigma2 = local_sigma2(y, xlag, g, x0, h, kernel, fit.mu, fit.gamma)
    if sigma2 <= 0.0:
        raise LocalFitError(f"zero local variance at x0={x0:g}")
    null_value = fit.mu + fit.gamma * float(g(x0))
    t = np.sqrt(lf.mass / (sigma2 * kernel.q11)) * (lf.value - null_value)
    return TStat(float(t), lf.value, null_value, sigma2, lf.mass)
