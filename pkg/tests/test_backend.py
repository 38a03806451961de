"""Agreement between the compiled extension and the numpy fallback."""

import os

import numpy as np
import pytest

from wnpreg import _backend, _core_py
from wnpreg.kernels import get_kernel

_core = pytest.importorskip(
    "wnpreg._core", reason="compiled extension not built; run pip install -e .")

GAUSS = get_kernel("gaussian")


def _case(n=400, seed=0):
    rng = np.random.default_rng(seed)
    xlag = np.cumsum(rng.normal(size=n))
    y = xlag + rng.normal(size=n)
    gx = xlag.copy()
    mu, gamma = 0.3, 0.9
    resid = y - mu - gamma * gx
    pts = np.quantile(xlag, np.linspace(0.1, 0.9, 9))
    gpts = pts.copy()
    nullvals = mu + gamma * gpts
    return xlag, y, gx, resid * resid, pts, gpts, nullvals


@pytest.mark.skipif(os.environ.get("WNPREG_BACKEND", "auto") == "python",
                    reason="numpy backend forced via WNPREG_BACKEND")
def test_backend_selected():
    assert _backend.BACKEND == "compiled"
    assert _backend.ftilde_tstats_gauss is _core.ftilde_tstats_gauss
    assert _backend.wp_sums_gauss is _core.wp_sums_gauss


@pytest.mark.parametrize("h", [0.2, 0.7, 2.0])
def test_tstats_cross_backend(h):
    xlag, y, gx, r2, pts, gpts, nullvals = _case()
    a = _core.ftilde_tstats_gauss(xlag, y, gx, r2, pts, gpts, nullvals,
                                  h, GAUSS.q11)
    b = _core_py.ftilde_tstats_gauss(xlag, y, gx, r2, pts, gpts, nullvals,
                                     h, GAUSS.q11)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("h", [0.2, 0.7, 2.0])
def test_wp_sums_cross_backend(h):
    xlag, y, gx, r2, *_ = _case(seed=1)
    uhat = y - 0.2 - 0.95 * xlag
    sa, va = _core.wp_sums_gauss(xlag, uhat, h)
    sb, vb = _core_py.wp_sums_gauss(xlag, uhat, h)
    assert sa == pytest.approx(sb, rel=1e-11)
    assert va == pytest.approx(vb, rel=1e-11)


def test_far_pairs_contribute_exactly_zero():
    # both implementations drop kernel weights once u^2/2 > 45, so two
    # clusters more than sqrt(90) * h apart never interact
    rng = np.random.default_rng(2)
    a = rng.normal(size=60)
    b = rng.normal(size=60) + 30.0
    x = np.concatenate([a, b])
    u = rng.normal(size=120)
    h = 1.0
    for f in (_core.wp_sums_gauss, _core_py.wp_sums_gauss):
        s_all, v_all = f(np.ascontiguousarray(x), np.ascontiguousarray(u), h)
        s_a, v_a = f(np.ascontiguousarray(a), np.ascontiguousarray(u[:60]), h)
        s_b, v_b = f(np.ascontiguousarray(b), np.ascontiguousarray(u[60:]), h)
        assert s_all == pytest.approx(s_a + s_b, rel=1e-12)
        assert v_all == pytest.approx(v_a + v_b, rel=1e-12)


def test_degenerate_point_matches_local_constant():
    # one observation inside the effective window: both backends return the
    # studentized local mean instead of a singular local line
    xlag = np.ascontiguousarray([0.0, 30.0, 60.0])
    y = np.ascontiguousarray([1.0, 5.0, 2.0])
    gx = xlag.copy()
    mu, gamma = 0.0, 0.1
    r2 = np.ascontiguousarray((y - mu - gamma * gx) ** 2)
    pts = np.ascontiguousarray([30.0])
    nullvals = np.ascontiguousarray(mu + gamma * pts)
    want_sigma2 = r2[1]  # only the middle point has weight
    want = np.sqrt(GAUSS(0.0) / (want_sigma2 * GAUSS.q11)) * (y[1] - nullvals[0])
    for f in (_core.ftilde_tstats_gauss, _core_py.ftilde_tstats_gauss):
        t = np.asarray(f(xlag, y, gx, r2, pts, pts, nullvals, 1.0, GAUSS.q11))
        assert t[0] == pytest.approx(float(want), rel=1e-12)


def test_empty_window_yields_nan():
    xlag = np.ascontiguousarray([0.0, 0.1, 0.2])
    y = np.ascontiguousarray([1.0, 2.0, 3.0])
    r2 = np.ascontiguousarray([1.0, 1.0, 1.0])
    pts = np.ascontiguousarray([1e5])
    nullvals = np.ascontiguousarray([0.0])
    for f in (_core.ftilde_tstats_gauss, _core_py.ftilde_tstats_gauss):
        t = np.asarray(f(xlag, y, xlag, r2, pts, pts, nullvals, 0.5, GAUSS.q11))
        assert np.isnan(t[0])


def test_env_var_controls_backend(tmp_path):
    import subprocess
    import sys
    code = "import wnpreg; print(wnpreg.BACKEND)"
    for want, env in (("python", "python"), ("compiled", "compiled")):
        out = subprocess.run([sys.executable, "-c", code],
                             env={"PATH": "/usr/bin:/bin", "WNPREG_BACKEND": env},
                             capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == want
