"""Limit-theory oracles and convergence diagnostics.

For a weakly nonstationary path with normalizer beta_n, the two sample
functionals in `wnpreg.kernels` converge to integrals against a limit
occupation density rho:

* ``fr2`` (type II fractional) and ``mi`` (mildly integrated):
  rho is the standard normal density -- the limits are deterministic
  and computable by quadrature.
* ``fr1`` (truncated type I fractional): rho(x) = phi_{1/2}(x - Xminus)
  with Xminus ~ N(0, 1/2) -- the limits are *random*; this module
  provides exact samplers for them instead of scalar values.
* ``ni`` (nearly integrated): the limit occupation density is random
  and has no elementary closed form; no oracle is offered.

`convergence_check` simulates a functional along an n-grid and compares
against the matching oracle (absolute error for deterministic limits,
two-sample Kolmogorov-Smirnov distance for random ones).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import ks_2samp

from .kernels import Kernel, get_kernel
from .procgen import ProcessSpec, presample_len, simulate_path
from .rng import stream

__all__ = [
    "FUNCTIONS",
    "FunctionalSpec",
    "limit_variant",
    "limit_additive",
    "limit_kernel",
    "fr1_additive_sample",
    "fr1_kernel_sample",
    "ls_limit_cov",
    "ConvergenceReport",
    "convergence_check",
]

_QUAD_OPTS = dict(epsabs=1e-10, epsrel=1e-10, limit=200)
_RANGE = 12.0

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _phi(x):
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def _phi_half(x):
    # N(0, 1/2) density
    return np.exp(-x * x) / np.sqrt(np.pi)


# named test functions usable from configuration files
FUNCTIONS = {
    "square": lambda x: x * x,
    "abs": np.abs,
    "cos": np.cos,
    "gauss": _phi,
    "indicator_pos": lambda x: (x > 0).astype(float) if isinstance(x, np.ndarray) else float(x > 0),
}


def limit_variant(spec: ProcessSpec) -> str:
    """Map a process spec to its limit family: "gauss", "fr1" or "none"."""
    if spec.kind in ("fr2", "mi"):
        return "gauss"
    if spec.kind == "fr1":
        return "fr1"
    return "none"


def limit_additive(f, variant: str = "gauss") -> float:
    """Deterministic limit of the additive functional: integral of f * phi.

    Only the "gauss" family (fr2 / mi) has a deterministic limit.
    """
    if variant != "gauss":
        raise ValueError(
            f"no deterministic additive limit for variant {variant!r}; "
            "use fr1_additive_sample for fr1")
    val, _ = quad(lambda x: f(np.float64(x)) * _phi(x), -_RANGE, _RANGE, **_QUAD_OPTS)
    return float(val)


def limit_kernel(kernel: Kernel | str, x: float = 0.0, variant: str = "gauss") -> float:
    """Deterministic limit of the kernel functional: phi(x) * integral of K."""
    if variant != "gauss":
        raise ValueError(
            f"no deterministic kernel-functional limit for variant {variant!r}; "
            "use fr1_kernel_sample for fr1")
    if isinstance(kernel, str):
        kernel = get_kernel(kernel)
    return float(_phi(x)) * kernel.nu(0)


def _sample_xminus(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.normal(0.0, np.sqrt(0.5), size)


_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)


def fr1_additive_sample(f, size: int, rng: np.random.Generator,
                        return_xminus: bool = False):
    """Draws of the random fr1 additive limit integral of f * phi_{1/2}(. - Xminus).

    With Xminus ~ N(0, 1/2) the conditional limit equals
    E[f(Xminus + Z/sqrt(2))], evaluated here by 64-node Gauss-Hermite
    quadrature (exact for polynomial f).
    """
    w = _sample_xminus(rng, size)
    # E f(w + Z/sqrt(2)) = (1/sqrt(pi)) sum_i gh_w[i] f(w + gh_x[i])
    grid = w[:, None] + _GH_NODES[None, :]
    vals = (np.asarray(f(grid)) @ _GH_WEIGHTS) / np.sqrt(np.pi)
    return (vals, w) if return_xminus else vals


def fr1_kernel_sample(kernel: Kernel | str, x: float, size: int,
                      rng: np.random.Generator, return_xminus: bool = False):
    """Draws of the random fr1 kernel-functional limit phi_{1/2}(x - Xminus) * int K."""
    if isinstance(kernel, str):
        kernel = get_kernel(kernel)
    w = _sample_xminus(rng, size)
    vals = _phi_half(x - w) * kernel.nu(0)
    return (vals, w) if return_xminus else vals


def ls_limit_cov(hg, variant: str = "gauss", sigma_u2: float = 1.0,
                 xminus: float = None) -> np.ndarray:
    """Limit covariance of the least-squares (mu, gamma) estimator.

    For the fitted model y = mu + gamma * H(x) + u the self-normalized
    LS limit covariance is sigma_u^2 * M^{-1} with
    M = integral of [[1, H], [H, H^2]] * rho.  For fr1, rho depends on
    the realization of Xminus: pass it via `xminus`.
    """
    center = 0.0
    if variant == "gauss":
        dens = _phi
    elif variant == "fr1":
        if xminus is None:
            raise ValueError("fr1 limit covariance is random: supply xminus")
        center = float(xminus)
        dens = lambda x: _phi_half(x - xminus)
    else:
        raise ValueError(f"no limit covariance oracle for variant {variant!r}")

    def entry(fun):
        val, _ = quad(lambda x: fun(np.float64(x)) * dens(x),
                      center - _RANGE, center + _RANGE, **_QUAD_OPTS)
        return val

    m00 = entry(lambda x: 1.0)
    m01 = entry(lambda x: hg(x))
    m11 = entry(lambda x: hg(x) ** 2)
    m = np.array([[m00, m01], [m01, m11]])
    return sigma_u2 * np.linalg.inv(m)


@dataclass(frozen=True)
class FunctionalSpec:
    """A named functional of the sample path for convergence studies.

    kind "additive": f applied through `additive_functional`.
    kind "kernel": `kernel_functional` at point x with h = n^b.
    """

    kind: str
    f: str = "square"
    kernel: str = "gaussian"
    x: float = 0.0
    b: float = -0.1

    def __post_init__(self):
        if self.kind not in ("additive", "kernel"):
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.kind == "additive" and self.f not in FUNCTIONS:
            raise ValueError(f"unknown function {self.f!r}; known: {sorted(FUNCTIONS)}")

    def label(self) -> str:
        if self.kind == "additive":
            return f"additive[{self.f}]"
        return f"kernel[{self.kernel},x={self.x:g},b={self.b:g}]"

    @classmethod
    def from_dict(cls, obj: dict) -> "FunctionalSpec":
        return cls(**obj)


@dataclass
class ConvergenceReport:
    """Per-n summary of a functional against its limit oracle."""

    process: ProcessSpec
    functional: FunctionalSpec
    reps: int
    rows: list

    def to_csv(self, fp) -> None:
        cols = ["n", "reps", "mean", "sd", "mc_se", "oracle_mean", "abs_err", "ks"]
        fp.write(",".join(cols) + "\n")
        for r in self.rows:
            fp.write(",".join(_fmt(r.get(c)) for c in cols) + "\n")

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"process {self.process.label()}  functional {self.functional.label()}"
                  f"  reps={self.reps}\n")
        for r in self.rows:
            line = (f"  n={r['n']:>8d}  mean={r['mean']:.6f}  sd={r['sd']:.6f}"
                    f"  mc_se={r['mc_se']:.6f}")
            if r.get("oracle_mean") is not None:
                line += f"  oracle={r['oracle_mean']:.6f}  abs_err={r['abs_err']:.6f}"
            if r.get("ks") is not None:
                line += f"  ks={r['ks']:.4f}"
            out.write(line + "\n")
        return out.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.10g}"


def _one_value(spec, func, n, xi):
    from .kernels import additive_functional, kernel_functional
    path = simulate_path(spec, n, xi)
    if func.kind == "additive":
        return additive_functional(path, FUNCTIONS[func.f])
    h = float(n) ** func.b
    return kernel_functional(path, get_kernel(func.kernel), func.x, h)


def convergence_check(spec: ProcessSpec, func: FunctionalSpec, n_grid,
                      reps: int, master_seed: int = 0) -> ConvergenceReport:
    """Simulate the functional along `n_grid` and compare with its oracle.

    Deterministic limits report the absolute error of the Monte Carlo
    mean; the random fr1 limit reports the two-sample KS distance
    between simulated functionals and exact limit draws.
    """
    variant = limit_variant(spec)
    rows = []
    for n in n_grid:
        n = int(n)
        vals = np.empty(reps)
        for r in range(reps):
            rng = stream(master_seed, "limits", spec.label(), func.label(), n, r)
            xi = rng.standard_normal(n + presample_len(spec, n))
            vals[r] = _one_value(spec, func, n, xi)
        row = {
            "n": n, "reps": reps,
            "mean": float(vals.mean()), "sd": float(vals.std(ddof=1)),
            "mc_se": float(vals.std(ddof=1) / np.sqrt(reps)),
            "oracle_mean": None, "abs_err": None, "ks": None,
        }
        if variant == "gauss":
            if func.kind == "additive":
                oracle = limit_additive(FUNCTIONS[func.f], "gauss")
            else:
                oracle = limit_kernel(func.kernel, func.x, "gauss")
            row["oracle_mean"] = oracle
            row["abs_err"] = abs(row["mean"] - oracle)
        elif variant == "fr1":
            orng = stream(master_seed, "limits-oracle", spec.label(), func.label(), n)
            if func.kind == "additive":
                draws = fr1_additive_sample(FUNCTIONS[func.f], reps, orng)
            else:
                draws = fr1_kernel_sample(func.kernel, func.x, reps, orng)
            row["oracle_mean"] = float(draws.mean())
            row["abs_err"] = abs(row["mean"] - row["oracle_mean"])
            row["ks"] = float(ks_2samp(vals, draws).statistic)
        rows.append(row)
    return ConvergenceReport(spec, func, reps, rows)
