"""Monte Carlo harness: designs, labels, determinism, and table shaping."""

import io

import numpy as np
import pytest
from scipy.stats import norm

from wnpreg.mc import (STANDARD_ALTERNATIVES, AlternativeSpec, McDesign,
                       run_power, run_size, size_adjust)
from wnpreg.mc import _cell_label, _stat_list
from wnpreg.procgen import ProcessSpec

_SMALL = dict(
    processes=(ProcessSpec("fr2", d=0.5, ma=(1.0, 0.5)),),
    n=(64,), b=(-0.1,), p=(5,), rho=(0.0, 0.5), reps=30)


# -- alternatives -----------------------------------------------------------

def test_alternative_gauss_pdf():
    alt = AlternativeSpec("gauss_pdf", 2.0, 1.0)
    x = np.array([-1.0, 0.0, 0.4])
    np.testing.assert_allclose(alt.g1(x), norm.pdf(2.0 * x), rtol=1e-12)
    assert alt.label() == "phi(2x)"
    assert AlternativeSpec("gauss_pdf").label() == "phi(x)"


def test_alternative_inverse_power_cap():
    alt = AlternativeSpec("inv_pow_capped", 2.0, 0.5)
    x = np.array([0.0, 0.5, 2.0, -4.0])
    np.testing.assert_allclose(alt.g1(x), [0.5, 0.5, 0.125, 0.03125])
    assert alt.label() == "0.5*min(|x|^-2,1)"


def test_alternative_abs_power():
    alt = AlternativeSpec("abs_pow", 1.5, 0.02)
    x = np.array([-4.0, 0.0, 4.0])
    np.testing.assert_allclose(alt.g1(x), [0.16, 0.0, 0.16])
    assert alt.label() == "0.02*|x|^1.5"
    assert AlternativeSpec("abs_pow", 2.0, 0.02).label() == "0.02*x^2"


def test_standard_alternatives_catalog():
    assert len(STANDARD_ALTERNATIVES) == 6
    labels = [a.label() for a in STANDARD_ALTERNATIVES]
    assert labels == ["phi(x)", "phi(2x)", "0.5*min(|x|^-2,1)",
                      "0.5*min(|x|^-1,1)", "0.02*|x|^1.5", "0.02*x^2"]


def test_alternative_validation():
    with pytest.raises(ValueError):
        AlternativeSpec("cubic")


# -- designs ----------------------------------------------------------------

def test_design_from_dict_standard_alternatives():
    design = McDesign.from_dict({
        "processes": [{"kind": "fr2", "d": 0.5, "ma": [1.0, 0.5]}],
        "n": [100], "b": [-0.1], "p": [17],
        "alternatives": "standard", "reps": 10})
    assert design.alternatives == STANDARD_ALTERNATIVES
    assert design.processes[0].d == 0.5
    assert design.reps == 10


def test_design_validation():
    base = dict(_SMALL)
    with pytest.raises(ValueError):
        McDesign(**{**base, "reps": 0})
    with pytest.raises(ValueError):
        McDesign(**{**base, "alpha": 0.0})
    with pytest.raises(ValueError):
        McDesign(**{**base, "n": (5,)})
    with pytest.raises(ValueError):
        McDesign(**{**base, "p": (0,)})


def test_stat_list_composition():
    d = McDesign(**{**_SMALL, "p": (17, 25), "b": (-0.2, -0.1)})
    assert _stat_list(d) == [("ftilde", 17, -0.2), ("ftilde", 17, -0.1),
                             ("ftilde", 25, -0.2), ("ftilde", 25, -0.1)]
    dw = McDesign(**{**_SMALL, "b": (-0.1,), "with_wp": True})
    assert _stat_list(dw)[-1] == ("wp", 0, -0.1)


def test_cell_label_stable():
    spec = ProcessSpec("fr2", d=0.5, ma=(1.0, 0.5))
    assert (_cell_label(spec, 200, -0.5, None)
            == "mc|fr2|d=0.5|ma=1,0.5|n=200|rho=-0.5|alt=none")
    alt = AlternativeSpec("gauss_pdf")
    assert _cell_label(spec, 200, 0.0, alt).endswith("|alt=phi(x)")


# -- size adjustment --------------------------------------------------------

def test_size_adjust():
    assert size_adjust(0.5, 0.05, 0.1) == 0.5
    assert size_adjust(0.5, 0.10, 0.1) == 0.5
    assert size_adjust(0.5, 0.15, 0.1) == pytest.approx(0.45)
    assert size_adjust(0.02, 0.30, 0.1) == 0.0


# -- runs -------------------------------------------------------------------

def _csv(result):
    buf = io.StringIO()
    result.to_csv(buf)
    return buf.getvalue()


def test_run_size_records_and_rates():
    design = McDesign(**_SMALL)
    res = run_size(design, master_seed=1, threads=1)
    assert len(res.records) == 2  # one process, one n, two rho, one stat
    for r in res.records:
        assert r["rate"] == pytest.approx(r["rejects"] / (design.reps - r["fails"]))
        assert 0.0 <= r["rate"] <= 1.0
        assert r["reps"] == 30


def test_run_size_deterministic_across_threads():
    design = McDesign(**_SMALL)
    a = _csv(run_size(design, master_seed=3, threads=1))
    b = _csv(run_size(design, master_seed=3, threads=1))
    c = _csv(run_size(design, master_seed=3, threads=2))
    assert a == b
    assert a == c
    d = _csv(run_size(design, master_seed=4, threads=1))
    assert a != d


def test_run_power_adjustment_and_wp():
    design = McDesign(**{**_SMALL, "rho": (0.0,),
                         "alternatives": (AlternativeSpec("gauss_pdf"),)})
    res = run_power(design, master_seed=2, threads=1)
    modes = {r["mode"] for r in res.records}
    assert modes == {"null", "power"}
    stats = {r["stat"] for r in res.records}
    assert stats == {"ftilde", "wp"}  # pair test switched on automatically
    for r in res.records:
        if r["mode"] == "power":
            assert r["adj_rate"] == pytest.approx(
                size_adjust(r["rate"], r["null_rate"], design.alpha))


def test_run_power_requires_alternatives():
    with pytest.raises(ValueError):
        run_power(McDesign(**_SMALL))


# -- tables -----------------------------------------------------------------

def test_size_table_takes_max_over_rho():
    design = McDesign(**_SMALL)
    res = run_size(design, master_seed=5, threads=1)
    headers, rows = res.size_table()
    assert headers == ["process", "n", "p5,b=-0.1"]
    by_rho = [r["rate"] for r in res.records]
    assert rows[0][2] == pytest.approx(max(by_rho))


def test_table_formats():
    design = McDesign(**_SMALL)
    res = run_size(design, master_seed=6, threads=1)
    buf = io.StringIO()
    res.table_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0].startswith("process,n,")
    assert len(lines) == 2
    md = res.table_markdown()
    assert md.startswith("| process | n |")
    assert md.count("\n") == 3


def test_raw_csv_shape():
    design = McDesign(**_SMALL)
    text = _csv(run_size(design, master_seed=7, threads=1))
    lines = text.strip().splitlines()
    assert lines[0] == ("mode,proc,n,rho,alt,stat,p,b,rate,null_rate,"
                       "adj_rate,rejects,fails,reps")
    assert len(lines) == 3
