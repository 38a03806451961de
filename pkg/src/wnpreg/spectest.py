"""Persistence-robust specification test and a residual-pair benchmark.

`f_tilde_test` checks the parametric null m(x) = mu + gamma g(x) by
studentizing the gap between a centered local fit and the parametric
fit at p sample quantile points and summing the squares:

    F = sum_j t_j(x_j)^2,

which is asymptotically chi-squared with p degrees of freedom under the
null for stationary, mildly/nearly integrated, unit-root and fractional
regressors alike -- the self-normalization removes the persistence rate
from the statistic.

`wp_test` implements the residual-pair statistic commonly used for the
same hypothesis (a degenerate U-statistic of OLS residuals, compared
against N(0,1)); it serves as the comparison method in the Monte Carlo
harness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, gammaincinv, ndtr, ndtri

from . import _backend
from .kernels import Kernel, get_kernel
from .procgen import SamplePath
from .regress import GFunction, IDENTITY, LocalFitError, ParametricFit, ols_fit

__all__ = [
    "EvalPoints",
    "SpecTestResult",
    "WpResult",
    "chi2_quantile",
    "chi2_sf",
    "eval_points",
    "tstat_vector",
    "f_tilde_test",
    "wp_statistic",
    "wp_test",
    "product_functional",
]


def chi2_quantile(df: int, prob: float) -> float:
    """Chi-squared quantile function (inverse CDF) via the regularized gamma."""
    if not 0.0 < prob < 1.0:
        raise ValueError("prob must be in (0, 1)")
    return 2.0 * float(gammaincinv(df / 2.0, prob))


def chi2_sf(df: int, value: float) -> float:
    """Chi-squared survival function P(X > value)."""
    if value < 0:
        return 1.0
    return float(gammaincc(df / 2.0, value / 2.0))


@dataclass
class EvalPoints:
    """Sample quantile evaluation points for the specification test."""

    points: np.ndarray
    levels: np.ndarray
    has_duplicates: bool


def eval_points(x_sample, p: int) -> EvalPoints:
    """p equally spaced sample quantiles of `x_sample` over [0.1, 0.9].

    Uses the order-statistic (type 1) quantile: the ceil(q * n)-th
    smallest observation.  For p = 1 the single level is 0.5.  Repeated
    points (possible in small or heavily tied samples) are kept but
    flagged, since they make the chi-squared calibration conservative.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    x_sample = np.asarray(x_sample, dtype=float)
    n = len(x_sample)
    if n < p:
        raise ValueError(f"need at least p={p} observations, got {n}")
    if p == 1:
        levels = np.array([0.5])
    else:
        levels = 0.1 + 0.8 * np.arange(p) / (p - 1)
    xs = np.sort(x_sample)
    idx = np.ceil(levels * n).astype(int) - 1
    idx = np.clip(idx, 0, n - 1)
    pts = xs[idx]
    return EvalPoints(pts, levels, bool(len(np.unique(pts)) < p))


@dataclass
class SpecTestResult:
    """Outcome of `f_tilde_test`."""

    f_tilde: float
    t: np.ndarray
    p: int
    alpha: float
    crit: float
    pvalue: float
    reject: bool
    points: np.ndarray
    has_duplicate_points: bool
    fit: ParametricFit = field(repr=False)

    def to_json(self) -> str:
        return json.dumps({
            "f_tilde": self.f_tilde,
            "t": [float(v) for v in self.t],
            "p": self.p,
            "alpha": self.alpha,
            "crit": self.crit,
            "pvalue": self.pvalue,
            "reject": self.reject,
            "points": [float(v) for v in self.points],
            "duplicate_points": self.has_duplicate_points,
            "mu": self.fit.mu,
            "gamma": self.fit.gamma,
        })


def tstat_vector(y, xlag, g: GFunction, pts: np.ndarray, h: float,
                  kernel: Kernel, fit: ParametricFit) -> np.ndarray:
    """Batch of studentized local discrepancies (backend-dispatched)."""
    y = np.ascontiguousarray(y, dtype=float)
    xlag = np.ascontiguousarray(xlag, dtype=float)
    gx = np.ascontiguousarray(g(xlag), dtype=float)
    resid = y - fit.mu - fit.gamma * gx
    r2 = np.ascontiguousarray(resid * resid)
    pts = np.ascontiguousarray(pts, dtype=float)
    gpts = np.ascontiguousarray(g(pts), dtype=float)
    nullvals = np.ascontiguousarray(fit.mu + fit.gamma * gpts)
    if kernel.name == "gaussian":
        t = _backend.ftilde_tstats_gauss(xlag, y, gx, r2, pts, gpts,
                                         nullvals, float(h), kernel.q11)
    else:
        t = _backend.ftilde_tstats_kernel(kernel, xlag, y, gx, r2, pts, gpts,
                                          nullvals, float(h), kernel.q11)
    t = np.asarray(t)
    if not np.all(np.isfinite(t)):
        j = int(np.flatnonzero(~np.isfinite(t))[0])
        raise LocalFitError(
            f"degenerate local fit at evaluation point x={pts[j]:g} (h={h:g})")
    return t


def f_tilde_test(y, xlag, g: GFunction = IDENTITY, h: float = None,
                 kernel: Kernel | str = "gaussian", p: int = 17,
                 alpha: float = 0.1, eval_sample=None,
                 fit: ParametricFit = None) -> SpecTestResult:
    """Specification test of y_t = mu + gamma g(x_{t-1}) + u_t.

    Parameters
    ----------
    y, xlag : array_like
        Response y_2..y_n and lagged regressor x_1..x_{n-1}.
    g : GFunction
        Known transformation in the parametric null.
    h : float
        Bandwidth (required).
    kernel : Kernel or str
        Smoothing kernel; Gaussian uses the compiled fast path.
    p : int
        Number of quantile evaluation points.
    alpha : float
        Nominal level of the chi-squared(p) test.
    eval_sample : array_like, optional
        Sample whose quantiles locate the evaluation points; defaults
        to `xlag`.  Pass the full path x_1..x_n when available.
    fit : ParametricFit, optional
        Reuse an existing parametric fit instead of refitting.
    """
    if h is None or h <= 0:
        raise ValueError("a positive bandwidth h is required")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if isinstance(kernel, str):
        kernel = get_kernel(kernel)
    y = np.asarray(y, dtype=float)
    xlag = np.asarray(xlag, dtype=float)
    if fit is None:
        fit = ols_fit(y, xlag, g)
    ep = eval_points(xlag if eval_sample is None else eval_sample, p)
    t = tstat_vector(y, xlag, g, ep.points, h, kernel, fit)
    f_stat = float(t @ t)
    crit = chi2_quantile(p, 1.0 - alpha)
    return SpecTestResult(
        f_tilde=f_stat, t=t, p=p, alpha=alpha, crit=crit,
        pvalue=chi2_sf(p, f_stat), reject=bool(f_stat > crit),
        points=ep.points, has_duplicate_points=ep.has_duplicates, fit=fit)


@dataclass
class WpResult:
    """Outcome of the residual-pair comparison test."""

    stat: float
    s: float
    v2: float
    alpha: float
    crit: float
    pvalue: float
    reject: bool
    fit: ParametricFit = field(repr=False)

    def to_json(self) -> str:
        return json.dumps({
            "stat": self.stat, "s": self.s, "v2": self.v2,
            "alpha": self.alpha, "crit": self.crit,
            "pvalue": self.pvalue, "reject": self.reject,
        })


def wp_statistic(y, xlag, h: float, kernel: Kernel | str = "gaussian",
                 fit: ParametricFit = None,
                 g: GFunction = IDENTITY) -> tuple[float, float, float, ParametricFit]:
    """Standardized residual-pair statistic (S / V, asymptotically N(0,1)).

    S sums u_s u_t K((x_s - x_t)/h) over off-diagonal residual pairs;
    V^2 = 2 sum u_s^2 u_t^2 K^2 standardizes it.
    """
    if h is None or h <= 0:
        raise ValueError("a positive bandwidth h is required")
    if isinstance(kernel, str):
        kernel = get_kernel(kernel)
    y = np.ascontiguousarray(y, dtype=float)
    xlag = np.ascontiguousarray(xlag, dtype=float)
    if fit is None:
        fit = ols_fit(y, xlag, g)
    uhat = np.ascontiguousarray(y - fit.mu - fit.gamma * g(xlag))
    if kernel.name == "gaussian":
        s, v2 = _backend.wp_sums_gauss(xlag, uhat, float(h))
    else:
        s, v2 = _backend.wp_sums_kernel(kernel, xlag, uhat, float(h))
    if v2 <= 0.0:
        raise LocalFitError("degenerate pair statistic: V^2 <= 0 "
                            "(bandwidth too small for the sample spread?)")
    return s / math.sqrt(v2), s, v2, fit


def wp_test(y, xlag, h: float, kernel: Kernel | str = "gaussian",
            alpha: float = 0.1, fit: ParametricFit = None,
            g: GFunction = IDENTITY) -> WpResult:
    """Two-sided residual-pair test against the standard normal."""
    stat, s, v2, fit = wp_statistic(y, xlag, h, kernel, fit, g)
    crit = float(ndtri(1.0 - alpha / 2.0))
    pvalue = 2.0 * float(1.0 - ndtr(abs(stat)))
    return WpResult(stat=stat, s=s, v2=v2, alpha=alpha, crit=crit,
                    pvalue=pvalue, reject=bool(abs(stat) > crit), fit=fit)


def product_functional(path: SamplePath, kernel: Kernel, x: float, xp: float,
                       h: float, j: int = 0, jp: int = 0) -> float:
    """Normalized cross-kernel sum over the path.

    (beta_n / (n h)) sum_t K_j((x_t - x)/h) K_jp((x_t - xp)/h) with
    K_j(u) = u^j K(u).  For distinct x, xp this vanishes as h -> 0;
    it is the off-diagonal term making the p local statistics
    asymptotically independent.
    """
    if h <= 0:
        raise ValueError("bandwidth h must be positive")
    u1 = (path.values - x) / h
    u2 = (path.values - xp) / h
    w = (u1 ** j) * kernel(u1) * (u2 ** jp) * kernel(u2)
    return float(path.beta / (path.n * h) * np.sum(w))
