"""Simulation of weakly nonstationary linear process arrays.

A process is described by a `ProcessSpec` and simulated at a sample size
``n`` from primitive innovations ``xi``.  All simulators share the array
form

    x_t(n) = sum_{j=0}^{t-1} phi_j(n) v_{t-j},      v_t = sum_i c_i xi_{t-i},

with filter weights ``phi`` depending on the kind:

* ``fr2``  -- truncated (type II) fractional process of order ``d``:
  ``phi_j`` are the coefficients of ``(1-L)^{-d}``, innovations before
  t=1 are not used.
* ``fr1``  -- truncated type I fractional process: partial sums of a
  half-differenced (order ``d``) stationary filter that extends ``trunc``
  periods before the sample.
* ``mi``   -- mildly integrated AR(1) with root ``1 - n^{-alpha_kappa}``,
  ``alpha_kappa`` in (0, 1).
* ``ni``   -- nearly integrated AR(1), the ``alpha_kappa = 1`` boundary
  case of ``mi``.

`exact_sd` returns the exact finite-sample standard deviation of
``x_n(n)``, the natural normalizer for limit functionals of the path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve, lfilter

__all__ = [
    "ProcessSpec",
    "InnovationSpec",
    "SamplePath",
    "frac_coeffs",
    "apply_ma",
    "presample_len",
    "simulate_type2",
    "simulate_type1",
    "simulate_mi",
    "simulate_path",
    "exact_sd",
    "correlated_innovations",
]

_KINDS = ("fr2", "fr1", "mi", "ni")

# above this length, direct convolution is slower than FFT
_FFT_CUTOFF = 4096


@dataclass(frozen=True)
class ProcessSpec:
    """Parametric description of a weakly nonstationary process.

    Parameters
    ----------
    kind : {"fr2", "fr1", "mi", "ni"}
        Process family, see module docstring.
    d : float
        Fractional integration order, in (0, 1].  Used by "fr2"/"fr1".
    alpha_kappa : float
        Exponent of the localizing rate kappa_n = n^alpha_kappa for
        "mi" (in (0, 1)); forced to 1.0 for "ni".
    ma : tuple of float
        Short-run MA coefficients c_0, ..., c_q applied to the primitive
        innovations.
    trunc : int or None
        Pre-sample truncation length M for "fr1".  None means the
        default 50 * n, resolved at simulation time.
    """

    kind: str
    d: float = 0.5
    alpha_kappa: float = 0.5
    ma: tuple[float, ...] = (1.0,)
    trunc: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        object.__setattr__(self, "ma", tuple(float(c) for c in self.ma))
        if len(self.ma) == 0:
            raise ValueError("ma must have at least one coefficient")
        if self.kind in ("fr2", "fr1") and not 0.0 < self.d <= 1.0:
            raise ValueError(f"d={self.d} outside (0, 1]")
        if self.kind == "ni":
            object.__setattr__(self, "alpha_kappa", 1.0)
        if self.kind == "mi" and not 0.0 < self.alpha_kappa < 1.0:
            raise ValueError(f"alpha_kappa={self.alpha_kappa} outside (0, 1)")
        if self.trunc is not None and int(self.trunc) < 1:
            raise ValueError("trunc must be a positive integer")

    @property
    def q(self) -> int:
        """Order of the MA filter."""
        return len(self.ma) - 1

    def trunc_for(self, n: int) -> int:
        """Pre-sample truncation length used at sample size n (fr1 only)."""
        return 50 * n if self.trunc is None else int(self.trunc)

    def rho_n(self, n: int) -> float:
        """Autoregressive root 1 - n^{-alpha_kappa} (mi/ni only)."""
        return 1.0 - float(n) ** (-self.alpha_kappa)

    def label(self) -> str:
        """Short human-readable tag, stable across runs (used for seeding)."""
        bits = [self.kind]
        if self.kind in ("fr2", "fr1"):
            bits.append(f"d={self.d:g}")
            if self.kind == "fr1":
                bits.append(f"M={'auto' if self.trunc is None else self.trunc}")
        else:
            bits.append(f"ak={self.alpha_kappa:g}")
        bits.append("ma=" + ",".join(f"{c:g}" for c in self.ma))
        return "|".join(bits)

    def to_json(self) -> str:
        obj = {"kind": self.kind, "d": self.d, "alpha_kappa": self.alpha_kappa,
               "ma": list(self.ma), "trunc": self.trunc}
        return json.dumps(obj)

    @classmethod
    def from_dict(cls, obj: dict) -> "ProcessSpec":
        known = {"kind", "d", "alpha_kappa", "ma", "trunc"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown ProcessSpec fields: {sorted(extra)}")
        kw = dict(obj)
        if "ma" in kw:
            kw["ma"] = tuple(kw["ma"])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ProcessSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class InnovationSpec:
    """Joint law of the regression error u_t and process innovation xi_t.

    (u_t, xi_t) are iid bivariate Gaussian with standard deviations
    (sigma_u, sigma_xi) and correlation rho.
    """

    rho: float = 0.0
    sigma_u: float = 1.0
    sigma_xi: float = 1.0

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho={self.rho} outside [-1, 1]")
        if self.sigma_u <= 0 or self.sigma_xi <= 0:
            raise ValueError("innovation standard deviations must be positive")


@dataclass(eq=False)
class SamplePath:
    """A simulated path x_1, ..., x_n with its exact normalizer.

    Attributes
    ----------
    values : ndarray
        The path (x_1, ..., x_n).
    beta : float
        Exact standard deviation of x_n(n), from `exact_sd`.
    spec : ProcessSpec
        The generating process.
    """

    values: np.ndarray
    beta: float
    spec: ProcessSpec = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.values)

    def write_csv(self, fp) -> None:
        """Write the path as CSV with header ``t,x``."""
        t = np.arange(1, self.n + 1)
        np.savetxt(fp, np.column_stack([t, self.values]),
                   fmt=["%d", "%.17g"], delimiter=",", header="t,x", comments="")


def frac_coeffs(d: float, nmax: int) -> np.ndarray:
    """Coefficients psi_0, ..., psi_nmax of the expansion of (1-L)^{-d}.

    Computed by the stable forward recursion
    ``psi_0 = 1, psi_j = psi_{j-1} * (j - 1 + d) / j``;
    equivalently psi_j = Gamma(j + d) / (Gamma(d) Gamma(j + 1)).
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    psi = np.empty(nmax + 1)
    psi[0] = 1.0
    for j in range(1, nmax + 1):
        psi[j] = psi[j - 1] * ((j - 1 + d) / j)
    return psi


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if min(len(a), len(b)) > 64 and max(len(a), len(b)) > _FFT_CUTOFF:
        return fftconvolve(a, b)
    return np.convolve(a, b)


def apply_ma(xi: np.ndarray, c: np.ndarray | tuple) -> np.ndarray:
    """Apply the MA filter c to innovations carrying a pre-sample.

    `xi` must contain q = len(c) - 1 pre-sample values at the front:
    ``xi = (xi_{1-q}, ..., xi_0, xi_1, ..., xi_T)``.  Returns
    ``v_t = sum_{i=0}^{q} c_i xi_{t-i}`` for t = 1, .., T.
    """
    c = np.asarray(c, dtype=float)
    xi = np.asarray(xi, dtype=float)
    q = len(c) - 1
    if len(xi) <= q:
        raise ValueError(f"need more than {q} innovations for an MA({q}) filter")
    if q == 0:
        return c[0] * xi
    return _convolve(c, xi)[q:len(xi)]


def presample_len(spec: ProcessSpec, n: int) -> int:
    """Number of pre-sample innovations consumed by `simulate_path`."""
    if spec.kind == "fr1":
        return spec.trunc_for(n) + spec.q
    return spec.q


def _check_xi(spec: ProcessSpec, n: int, xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    want = n + presample_len(spec, n)
    if xi.ndim != 1 or len(xi) != want:
        raise ValueError(
            f"xi must be 1-d of length n + presample = {want}, got shape {xi.shape}")
    return xi


def simulate_type2(spec: ProcessSpec, n: int, xi: np.ndarray) -> SamplePath:
    """Type II fractional path: x_t = sum_{j=0}^{t-1} psi_j(d) v_{t-j}.

    `xi` has length n + q (q pre-sample values first).  Innovations
    before t = 1 enter only through the MA filter.
    """
    xi = _check_xi(spec, n, xi)
    v = apply_ma(xi, spec.ma)
    psi = frac_coeffs(spec.d, n - 1)
    x = _convolve(psi, v)[:n]
    return SamplePath(x, exact_sd(spec, n), spec)


def simulate_type1(spec: ProcessSpec, n: int, xi: np.ndarray) -> SamplePath:
    """Truncated type I fractional path.

    With ctilde the first M+1 coefficients of (1-L)^{-(-d)} = (1-L)^{d},
    the path is x_t = sum_{s=1}^{t} z_s where
    ``z_s = sum_{j=0}^{M} ctilde_j v_{s-j}`` reaches M = `trunc_for(n)`
    periods before the sample.  `xi` has length n + M + q.
    """
    xi = _check_xi(spec, n, xi)
    m = spec.trunc_for(n)
    # combined filter on xi: (1-L)^d truncated at M, then the MA part
    eff = _convolve(frac_coeffs(-spec.d, m), np.asarray(spec.ma))
    z = apply_ma(xi, eff)
    x = np.cumsum(z)
    return SamplePath(x, exact_sd(spec, n), spec)


def simulate_mi(spec: ProcessSpec, n: int, xi: np.ndarray) -> SamplePath:
    """Mildly/nearly integrated path: x_t = rho_n x_{t-1} + v_t, x_0 = 0."""
    xi = _check_xi(spec, n, xi)
    v = apply_ma(xi, spec.ma)
    x = lfilter([1.0], [1.0, -spec.rho_n(n)], v)
    return SamplePath(x, exact_sd(spec, n), spec)


def simulate_path(spec: ProcessSpec, n: int, xi: np.ndarray) -> SamplePath:
    """Simulate x_1, ..., x_n from primitive innovations `xi`.

    `xi` must have length ``n + presample_len(spec, n)`` with the
    pre-sample values first.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if spec.kind == "fr2":
        return simulate_type2(spec, n, xi)
    if spec.kind == "fr1":
        return simulate_type1(spec, n, xi)
    return simulate_mi(spec, n, xi)


def _innovation_weights(spec: ProcessSpec, n: int) -> np.ndarray:
    """Weights a_k such that x_n(n) = sum_k a_k xi_{n-k}."""
    c = np.asarray(spec.ma)
    q = spec.q
    if spec.kind == "fr2":
        phi = frac_coeffs(spec.d, n - 1)
        return _convolve(phi, c)
    if spec.kind in ("mi", "ni"):
        phi = spec.rho_n(n) ** np.arange(n)
        return _convolve(phi, c)
    # fr1: x_n = sum_{s=1}^n z_s with z the eff-filtered innovations, so the
    # weight on xi_{n-k} is a windowed partial sum of the filter coefficients
    m = spec.trunc_for(n)
    eff = _convolve(frac_coeffs(-spec.d, m), c)
    csum = np.concatenate([[0.0], np.cumsum(eff)])
    k = np.arange(n + m + q)
    hi = np.minimum(k, m + q)
    lo = np.maximum(0, k - n + 1)
    return csum[hi + 1] - csum[lo]


def exact_sd(spec: ProcessSpec, n: int, sigma_xi: float = 1.0) -> float:
    """Exact standard deviation of x_n(n) for unit-variance innovations.

    Writes x_n = sum_k a_k xi_{n-k} and returns
    ``sigma_xi * sqrt(sum_k a_k^2)``; no asymptotic approximation.
    """
    a = _innovation_weights(spec, n)
    return float(sigma_xi) * float(np.sqrt(np.sum(a * a)))


def correlated_innovations(innov: InnovationSpec, n: int, presample: int,
                           rng: np.random.Generator):
    """Draw (u, xi) for a regression design with correlated errors.

    Returns
    -------
    u : ndarray, shape (n,)
        Regression errors u_1, ..., u_n.
    xi : ndarray, shape (n + presample,)
        Process innovations xi_{1-presample}, ..., xi_n; each xi_t is
        paired with u_t at correlation `innov.rho`.
    """
    z = rng.standard_normal((n + presample, 2))
    xi = innov.sigma_xi * z[:, 0]
    u = innov.sigma_u * (innov.rho * z[:, 0]
                         + np.sqrt(1.0 - innov.rho ** 2) * z[:, 1])
    return u[presample:], xi
