"""Limit oracles: quadrature values, exact samplers, and convergence runs."""

import io

import numpy as np
import pytest

from wnpreg.kernels import get_kernel
from wnpreg.limits import (FUNCTIONS, ConvergenceReport, FunctionalSpec,
                           convergence_check, fr1_additive_sample,
                           fr1_kernel_sample, limit_additive, limit_kernel,
                           limit_variant, ls_limit_cov)
from wnpreg.procgen import ProcessSpec
from wnpreg.rng import stream

SQRT_2PI = np.sqrt(2.0 * np.pi)


# -- deterministic limits ---------------------------------------------------

def test_limit_additive_closed_forms():
    assert limit_additive(FUNCTIONS["square"]) == pytest.approx(1.0, abs=1e-8)
    assert limit_additive(FUNCTIONS["abs"]) == pytest.approx(
        np.sqrt(2.0 / np.pi), abs=1e-8)
    assert limit_additive(FUNCTIONS["indicator_pos"]) == pytest.approx(0.5, abs=1e-8)
    # integral of phi^2 = 1 / (2 sqrt(pi))
    assert limit_additive(FUNCTIONS["gauss"]) == pytest.approx(
        1.0 / (2.0 * np.sqrt(np.pi)), abs=1e-8)
    # E cos(Z) = exp(-1/2)
    assert limit_additive(FUNCTIONS["cos"]) == pytest.approx(
        np.exp(-0.5), abs=1e-8)


def test_limit_kernel_closed_forms():
    assert limit_kernel("gaussian", 0.0) == pytest.approx(1.0 / SQRT_2PI, abs=1e-8)
    assert limit_kernel("uniform", 0.0) == pytest.approx(1.0 / SQRT_2PI, abs=1e-8)
    assert limit_kernel("gaussian", 1.0) == pytest.approx(
        np.exp(-0.5) / SQRT_2PI, abs=1e-8)


def test_limit_variant_mapping():
    assert limit_variant(ProcessSpec("fr2")) == "gauss"
    assert limit_variant(ProcessSpec("mi")) == "gauss"
    assert limit_variant(ProcessSpec("fr1")) == "fr1"
    assert limit_variant(ProcessSpec("ni")) == "none"


def test_non_deterministic_variants_raise():
    with pytest.raises(ValueError):
        limit_additive(FUNCTIONS["square"], "fr1")
    with pytest.raises(ValueError):
        limit_kernel("gaussian", 0.0, "none")


# -- random fr1 limits ------------------------------------------------------

def test_fr1_additive_sample_polynomials_exact():
    # conditional on Xminus = w the limit is E f(w + Z / sqrt(2)); for
    # f = x^2 that is w^2 + 1/2, and for f = x it is w (quadrature exact)
    rng = stream(0, "fr1-exact")
    vals, w = fr1_additive_sample(FUNCTIONS["square"], 200, rng,
                                  return_xminus=True)
    np.testing.assert_allclose(vals, w * w + 0.5, rtol=1e-10, atol=1e-12)
    rng = stream(0, "fr1-exact-lin")
    vals, w = fr1_additive_sample(lambda x: x, 100, rng, return_xminus=True)
    np.testing.assert_allclose(vals, w, rtol=1e-9, atol=1e-12)


def test_fr1_additive_sample_mean():
    # E[Xminus^2] + 1/2 = 1
    rng = stream(1, "fr1-mean")
    vals = fr1_additive_sample(FUNCTIONS["square"], 20000, rng)
    assert np.mean(vals) == pytest.approx(1.0, abs=0.03)


def test_fr1_kernel_sample_closed_form():
    rng = stream(2, "fr1-kern")
    vals, w = fr1_kernel_sample("gaussian", 0.3, 500, rng, return_xminus=True)
    want = np.exp(-(0.3 - w) ** 2) / np.sqrt(np.pi)  # N(0, 1/2) density
    np.testing.assert_allclose(vals, want, rtol=1e-10)


def test_fr1_xminus_distribution():
    rng = stream(3, "fr1-x")
    _, w = fr1_kernel_sample("gaussian", 0.0, 50000, rng, return_xminus=True)
    assert np.mean(w) == pytest.approx(0.0, abs=0.01)
    assert np.var(w) == pytest.approx(0.5, abs=0.01)


# -- least-squares limit covariance -----------------------------------------

def test_ls_limit_cov_indicator():
    cov = ls_limit_cov(lambda x: float(x > 0))
    np.testing.assert_allclose(cov, [[2.0, -2.0], [-2.0, 4.0]], atol=1e-6)
    cov2 = ls_limit_cov(lambda x: float(x > 0), sigma_u2=2.0)
    np.testing.assert_allclose(cov2, [[4.0, -4.0], [-4.0, 8.0]], atol=1e-6)


def test_ls_limit_cov_identity():
    cov = ls_limit_cov(lambda x: x)
    np.testing.assert_allclose(cov, np.eye(2), atol=1e-6)


def test_ls_limit_cov_fr1():
    with pytest.raises(ValueError):
        ls_limit_cov(lambda x: x, variant="fr1")
    w = 0.7
    cov = ls_limit_cov(lambda x: x, variant="fr1", xminus=w)
    want = np.linalg.inv(np.array([[1.0, w], [w, w * w + 0.5]]))
    np.testing.assert_allclose(cov, want, atol=1e-6)
    with pytest.raises(ValueError):
        ls_limit_cov(lambda x: x, variant="none")


# -- functional specs and convergence runs ----------------------------------

def test_functional_spec_labels_and_validation():
    assert FunctionalSpec("additive", f="square").label() == "additive[square]"
    assert (FunctionalSpec("kernel", kernel="gaussian", x=0.0, b=-0.1).label()
            == "kernel[gaussian,x=0,b=-0.1]")
    with pytest.raises(ValueError):
        FunctionalSpec("multiplicative")
    with pytest.raises(ValueError):
        FunctionalSpec("additive", f="sinh")


def test_convergence_check_gauss_variant():
    spec = ProcessSpec("mi", alpha_kappa=0.5)
    func = FunctionalSpec("additive", f="square")
    rep = convergence_check(spec, func, [300], reps=60, master_seed=0)
    assert isinstance(rep, ConvergenceReport)
    row = rep.rows[0]
    assert row["oracle_mean"] == pytest.approx(1.0, abs=1e-8)
    assert row["abs_err"] == pytest.approx(abs(row["mean"] - 1.0), abs=1e-12)
    assert row["ks"] is None
    assert row["mean"] == pytest.approx(1.0, abs=0.2)


def test_convergence_check_fr1_variant_reports_ks():
    spec = ProcessSpec("fr1", d=0.5, trunc=30)
    func = FunctionalSpec("additive", f="square")
    rep = convergence_check(spec, func, [120], reps=40, master_seed=0)
    row = rep.rows[0]
    assert row["ks"] is not None
    assert 0.0 <= row["ks"] <= 1.0


def test_convergence_check_deterministic():
    spec = ProcessSpec("mi", alpha_kappa=0.5)
    func = FunctionalSpec("kernel", kernel="gaussian", x=0.0, b=-0.1)
    a = convergence_check(spec, func, [200], reps=25, master_seed=9)
    b = convergence_check(spec, func, [200], reps=25, master_seed=9)
    assert a.rows == b.rows


def test_report_formats():
    spec = ProcessSpec("mi", alpha_kappa=0.5)
    func = FunctionalSpec("additive", f="square")
    rep = convergence_check(spec, func, [150, 300], reps=20, master_seed=1)
    buf = io.StringIO()
    rep.to_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "n,reps,mean,sd,mc_se,oracle_mean,abs_err,ks"
    assert len(lines) == 3
    text = rep.to_text()
    assert "n=     150" in text
    assert "oracle=" in text
