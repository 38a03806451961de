"""Kernel functions, their moment matrices, and sample-path functionals.

A `Kernel` bundles a vectorized density-like weight function with the
moment quantities entering local regression theory:

* ``nu(j)``   : integral of u^j K(u)
* ``nu2(j)``  : integral of u^j K(u)^2
* ``A``, ``B``: 2x2 moment matrices [[nu0, nu1], [nu1, nu2]] for K and K^2
* ``Q``       : A^{-1} B A^{-1}, whose (0,0) entry normalizes the local
  intercept's variance.

Moments are computed once by adaptive quadrature over the kernel's
support; closed-form values for the built-in kernels are pinned in the
test-suite as an independent check.

`additive_functional` and `kernel_functional` are the two normalized
sample statistics whose large-sample behaviour the rest of the package
targets: for a weakly nonstationary path with normalizer beta_n,

    (1/n)    sum_t f(x_t / beta_n)            -> integral of f * rho
    (beta_n/(n h)) sum_t K((x_t - x) / h)     -> rho(x) * integral of K

with rho the relevant limit occupation density.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .procgen import SamplePath

__all__ = [
    "Kernel",
    "make_kernel",
    "get_kernel",
    "KERNEL_NAMES",
    "additive_functional",
    "kernel_functional",
]

_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-12, limit=200)


@dataclass(frozen=True, eq=False)
class Kernel:
    """A kernel weight function with cached moment matrices."""

    name: str
    fn: callable = field(repr=False)
    support: tuple[float, float]

    def __call__(self, u):
        return self.fn(np.asarray(u, dtype=float))

    def _moment(self, j: int, squared: bool) -> float:
        lo, hi = self.support
        if squared:
            val, _ = quad(lambda u: u ** j * self.fn(np.float64(u)) ** 2,
                          lo, hi, **_QUAD_OPTS)
        else:
            val, _ = quad(lambda u: u ** j * self.fn(np.float64(u)),
                          lo, hi, **_QUAD_OPTS)
        return val

    def nu(self, j: int) -> float:
        """j-th moment of K."""
        return self._cache("nu", j, False)

    def nu2(self, j: int) -> float:
        """j-th moment of K^2."""
        return self._cache("nu2", j, True)

    def _cache(self, tag: str, j: int, squared: bool) -> float:
        store = self.__dict__.setdefault("_moments", {})
        key = (tag, j)
        if key not in store:
            store[key] = self._moment(j, squared)
        return store[key]

    @property
    def A(self) -> np.ndarray:
        return np.array([[self.nu(0), self.nu(1)], [self.nu(1), self.nu(2)]])

    @property
    def B(self) -> np.ndarray:
        return np.array([[self.nu2(0), self.nu2(1)], [self.nu2(1), self.nu2(2)]])

    @property
    def Q(self) -> np.ndarray:
        """A^{-1} B A^{-1}; Q[0, 0] scales the local intercept variance."""
        ainv = np.linalg.inv(self.A)
        return ainv @ self.B @ ainv

    @property
    def q11(self) -> float:
        return float(self.Q[0, 0])


_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _gauss(u):
    return _INV_SQRT_2PI * np.exp(-0.5 * u * u)


def _uniform(u):
    return np.where(np.abs(u) <= 0.5, 1.0, 0.0)


def _epanechnikov(u):
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


_BUILTINS = {
    "gaussian": (_gauss, (-20.0, 20.0)),
    "uniform": (_uniform, (-0.5, 0.5)),
    "epanechnikov": (_epanechnikov, (-1.0, 1.0)),
}

KERNEL_NAMES = tuple(_BUILTINS)

_REGISTRY: dict[str, Kernel] = {}


def make_kernel(name: str, fn, support) -> Kernel:
    """Create (and register) a kernel from a vectorized weight function."""
    k = Kernel(name, fn, (float(support[0]), float(support[1])))
    _REGISTRY[name] = k
    return k


def get_kernel(name: str) -> Kernel:
    """Return a built-in or registered kernel by name."""
    if name not in _REGISTRY:
        if name not in _BUILTINS:
            raise KeyError(f"unknown kernel {name!r}; known: {sorted(set(_BUILTINS) | set(_REGISTRY))}")
        fn, support = _BUILTINS[name]
        make_kernel(name, fn, support)
    return _REGISTRY[name]


def additive_functional(path: SamplePath, f) -> float:
    """Normalized additive functional (1/n) sum_t f(x_t / beta_n)."""
    vals = f(path.values / path.beta)
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0]) + 1
        raise FloatingPointError(f"f(x_t/beta) not finite at t={bad}")
    return float(np.mean(vals))


def kernel_functional(path: SamplePath, kernel: Kernel, x: float, h: float) -> float:
    """Normalized kernel functional (beta_n/(n h)) sum_t K((x_t - x)/h)."""
    if h <= 0:
        raise ValueError("bandwidth h must be positive")
    w = kernel((path.values - x) / h)
    return float(path.beta / (path.n * h) * np.sum(w))
