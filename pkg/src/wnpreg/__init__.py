"""wnpreg: weakly nonstationary regression and specification testing.

Simulation of fractionally integrated (type I/II) and mildly/nearly
integrated processes, kernel-local regression estimators, a
persistence-robust chi-squared specification test, limit-theory
oracles, and a deterministic Monte Carlo harness.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .kernels import (Kernel, additive_functional, get_kernel, kernel_functional,
                      make_kernel)
from .limits import (FunctionalSpec, convergence_check, fr1_additive_sample,
                     fr1_kernel_sample, limit_additive, limit_kernel, ls_limit_cov)
from .mc import (STANDARD_ALTERNATIVES, AlternativeSpec, McDesign, McResult,
                 run_power, run_size, size_adjust)
from .procgen import (InnovationSpec, ProcessSpec, SamplePath, apply_ma,
                      correlated_innovations, exact_sd, frac_coeffs,
                      presample_len, simulate_mi, simulate_path, simulate_type1,
                      simulate_type2)
from .regress import (IDENTITY, SIGN, SQUARE, GFunction, LocalFit, LocalFitError,
                      ParametricFit, TStat, local_g, local_sigma2, loclin, nw,
                      np_tstat_fit, np_tstat_m0, ols_fit)
from .rng import stream
from .spectest import (EvalPoints, SpecTestResult, WpResult, chi2_quantile,
                       chi2_sf, eval_points, f_tilde_test, product_functional,
                       tstat_vector, wp_statistic, wp_test)

__all__ = [
    "BACKEND", "__version__",
    # procgen
    "ProcessSpec", "InnovationSpec", "SamplePath", "frac_coeffs", "apply_ma",
    "presample_len", "simulate_type2", "simulate_type1", "simulate_mi",
    "simulate_path", "exact_sd", "correlated_innovations",
    # kernels
    "Kernel", "make_kernel", "get_kernel", "additive_functional",
    "kernel_functional",
    # regress
    "GFunction", "IDENTITY", "SQUARE", "SIGN", "ParametricFit", "LocalFit",
    "TStat", "LocalFitError", "ols_fit", "nw", "loclin", "local_g",
    "local_sigma2", "np_tstat_m0", "np_tstat_fit",
    # spectest
    "EvalPoints", "SpecTestResult", "WpResult", "chi2_quantile", "chi2_sf",
    "eval_points", "tstat_vector", "f_tilde_test", "wp_statistic", "wp_test",
    "product_functional",
    # mc
    "AlternativeSpec", "STANDARD_ALTERNATIVES", "McDesign", "McResult",
    "run_size", "run_power", "size_adjust",
    # limits
    "FunctionalSpec", "convergence_check", "limit_additive", "limit_kernel",
    "fr1_additive_sample", "fr1_kernel_sample", "ls_limit_cov",
    # rng
    "stream",
]
