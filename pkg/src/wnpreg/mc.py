"""Monte Carlo harness for size and power of the specification tests.

The data generating process for every experiment is

    y_t = x_{t-1} + g1(x_{t-1}) + u_t,        t = 2, ..., n,

with x simulated from a `ProcessSpec`, (u_t, xi_t) iid bivariate normal
with correlation rho, and g1 an optional deviation from the linear null
(g1 = 0 under the null).  Each replication applies the chi-squared
specification test for every (p, b) combination -- with bandwidth
h = n^b and evaluation points taken from the quantiles of the full path
-- and optionally the residual-pair comparison test.

Replications are seeded as (master_seed, cell label, replication
index), so any scheduling of the work across processes reproduces the
same decisions; counts are reduced by integer summation, making every
output byte-identical for any --threads value.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from . import _backend
from .kernels import get_kernel
from .procgen import (InnovationSpec, ProcessSpec, correlated_innovations,
                      presample_len, simulate_path)
from .regress import IDENTITY, LocalFitError, ols_fit
from .rng import stream
from .spectest import chi2_quantile, eval_points, tstat_vector

__all__ = [
    "AlternativeSpec",
    "STANDARD_ALTERNATIVES",
    "McDesign",
    "McResult",
    "size_adjust",
    "run_size",
    "run_power",
]

_FAIL_FRACTION = 1e-3  # a cell tolerates at most this share of failed reps


@dataclass(frozen=True)
class AlternativeSpec:
    """A deviation g1 added to the linear regression function.

    kind "gauss_pdf":        mult * phi(param * x)
    kind "inv_pow_capped":   mult * min(|x|^(-param), 1)
    kind "abs_pow":          mult * |x|^param
    """

    kind: str
    param: float = 1.0
    mult: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gauss_pdf", "inv_pow_capped", "abs_pow"):
            raise ValueError(f"unknown alternative kind {self.kind!r}")

    def g1(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "gauss_pdf":
            z = self.param * x
            return self.mult * np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)
        if self.kind == "inv_pow_capped":
            # min(|x|^-p, 1) == max(|x|, 1)^-p, safe at x = 0
            return self.mult * np.maximum(np.abs(x), 1.0) ** (-self.param)
        return self.mult * np.abs(x) ** self.param

    def label(self) -> str:
        if self.kind == "gauss_pdf":
            core = "phi(x)" if self.param == 1 else f"phi({self.param:g}x)"
        elif self.kind == "inv_pow_capped":
            core = f"min(|x|^-{self.param:g},1)"
        else:
            core = "x^2" if self.param == 2 else f"|x|^{self.param:g}"
        return core if self.mult == 1 else f"{self.mult:g}*{core}"

    @classmethod
    def from_dict(cls, obj: dict) -> "AlternativeSpec":
        return cls(**obj)


STANDARD_ALTERNATIVES = (
    AlternativeSpec("gauss_pdf", 1.0, 1.0),
    AlternativeSpec("gauss_pdf", 2.0, 1.0),
    AlternativeSpec("inv_pow_capped", 2.0, 0.5),
    AlternativeSpec("inv_pow_capped", 1.0, 0.5),
    AlternativeSpec("abs_pow", 1.5, 0.02),
    AlternativeSpec("abs_pow", 2.0, 0.02),
)


@dataclass(frozen=True)
class McDesign:
    """Grid of an experiment: processes x n x rho, tests indexed by (p, b)."""

    processes: tuple
    n: tuple
    b: tuple
    p: tuple
    rho: tuple = (0.0,)
    reps: int = 1000
    alpha: float = 0.1
    kernel: str = "gaussian"
    with_wp: bool = False
    alternatives: tuple = ()
    rho_power: float = 0.0
    sigma_u: float = 1.0
    sigma_xi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "processes", tuple(self.processes))
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "p", tuple(int(v) for v in self.p))
        object.__setattr__(self, "rho", tuple(float(v) for v in self.rho))
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        if self.reps < 1:
            raise ValueError("reps must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if any(n < 10 for n in self.n):
            raise ValueError("sample sizes below 10 are not supported")
        if any(p < 1 for p in self.p):
            raise ValueError("p must be >= 1")

    @classmethod
    def from_dict(cls, obj: dict) -> "McDesign":
        obj = dict(obj)
        procs = tuple(ProcessSpec.from_dict(o) for o in obj.pop("processes"))
        alts = obj.pop("alternatives", ())
        if alts == "standard":
            alts = STANDARD_ALTERNATIVES
        else:
            alts = tuple(AlternativeSpec.from_dict(o) for o in alts)
        return cls(processes=procs, alternatives=alts, **obj)

    @classmethod
    def from_json(cls, text: str) -> "McDesign":
        return cls.from_dict(json.loads(text))


def _stat_list(design: McDesign):
    stats = [("ftilde", p, b) for p in design.p for b in design.b]
    if design.with_wp:
        stats += [("wp", 0, b) for b in design.b]
    return stats


def _cell_label(spec: ProcessSpec, n: int, rho: float, alt) -> str:
    a = "none" if alt is None else alt.label()
    return f"mc|{spec.label()}|n={n}|rho={rho:g}|alt={a}"


@dataclass(frozen=True)
class _Chunk:
    spec: ProcessSpec
    n: int
    rho: float
    alt: object
    design: McDesign
    master_seed: int
    rep_lo: int
    rep_hi: int


def _run_chunk(chunk: _Chunk):
    """Decisions for replications [rep_lo, rep_hi) of one cell."""
    design = chunk.design
    spec, n, rho, alt = chunk.spec, chunk.n, chunk.rho, chunk.alt
    stats = _stat_list(design)
    counts = np.zeros(len(stats), dtype=np.int64)
    fails = 0
    kernel = get_kernel(design.kernel)
    innov = InnovationSpec(rho=rho, sigma_u=design.sigma_u, sigma_xi=design.sigma_xi)
    label = _cell_label(spec, n, rho, alt)
    pre = presample_len(spec, n)
    crits = {p: chi2_quantile(p, 1.0 - design.alpha) for p in design.p}
    zcrit = float(ndtri(1.0 - design.alpha / 2.0))
    hs = {b: float(n) ** b for b in design.b}

    for rep in range(chunk.rep_lo, chunk.rep_hi):
        rng = stream(chunk.master_seed, label, rep)
        u, xi = correlated_innovations(innov, n, pre, rng)
        path = simulate_path(spec, n, xi)
        x = path.values
        xlag = x[:-1]
        y = xlag + u[1:]
        if alt is not None:
            y = y + alt.g1(xlag)
        try:
            fit = ols_fit(y, xlag)
            pts = {p: eval_points(x, p).points for p in design.p}
            uhat = None
            if design.with_wp:
                uhat = np.ascontiguousarray(y - fit.mu - fit.gamma * xlag)
            k = 0
            decisions = np.zeros(len(stats), dtype=np.int64)
            for p in design.p:
                for b in design.b:
                    t = tstat_vector(y, xlag, IDENTITY, pts[p], hs[b], kernel, fit)
                    decisions[k] = float(t @ t) > crits[p]
                    k += 1
            if design.with_wp:
                for b in design.b:
                    if kernel.name == "gaussian":
                        s, v2 = _backend.wp_sums_gauss(xlag, uhat, hs[b])
                    else:
                        s, v2 = _backend.wp_sums_kernel(kernel, xlag, uhat, hs[b])
                    if v2 <= 0.0:
                        raise LocalFitError("degenerate pair statistic")
                    decisions[k] = abs(s / math.sqrt(v2)) > zcrit
                    k += 1
        except (LocalFitError, FloatingPointError):
            fails += 1
            continue
        counts += decisions
    return counts, fails


def _run_cells(cells, design: McDesign, master_seed: int, threads: int):
    """Run all (spec, n, rho, alt) cells; returns {cell_index: (counts, fails)}."""
    nstats = len(_stat_list(design))
    sums = {i: np.zeros(nstats, dtype=np.int64) for i in range(len(cells))}
    fails = {i: 0 for i in range(len(cells))}
    chunk_len = max(1, min(500, math.ceil(design.reps / max(1, 4 * threads))))
    chunks = []
    for i, (spec, n, rho, alt) in enumerate(cells):
        for lo in range(0, design.reps, chunk_len):
            chunks.append((i, _Chunk(spec, n, rho, alt, design, master_seed,
                                     lo, min(lo + chunk_len, design.reps))))
    if threads <= 1:
        for i, ch in chunks:
            c, f = _run_chunk(ch)
            sums[i] += c
            fails[i] += f
    else:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            futs = {ex.submit(_run_chunk, ch): i for i, ch in chunks}
            for fut in as_completed(futs):
                c, f = fut.result()
                i = futs[fut]
                sums[i] += c
                fails[i] += f
    for i, (spec, n, rho, alt) in enumerate(cells):
        if fails[i] > max(1, _FAIL_FRACTION * design.reps):
            raise RuntimeError(
                f"cell {_cell_label(spec, n, rho, alt)}: {fails[i]} of "
                f"{design.reps} replications failed")
    return sums, fails


def size_adjust(power: float, null_rate: float, alpha: float) -> float:
    """Deduct any size distortion above alpha from a raw power figure."""
    if null_rate > alpha:
        return max(0.0, power - (null_rate - alpha))
    return power


_CSV_COLS = ["mode", "proc", "n", "rho", "alt", "stat", "p", "b",
             "rate", "null_rate", "adj_rate", "rejects", "fails", "reps"]


@dataclass
class McResult:
    """Long-format records of a Monte Carlo run plus table formatting."""

    mode: str
    design: McDesign
    master_seed: int
    records: list = field(default_factory=list)

    def to_csv(self, fp) -> None:
        fp.write(",".join(_CSV_COLS) + "\n")
        for r in self.records:
            row = []
            for c in _CSV_COLS:
                v = r.get(c)
                if v is None:
                    row.append("")
                elif c in ("rate", "null_rate", "adj_rate"):
                    row.append(f"{v:.6f}")
                elif c in ("rho", "b"):
                    row.append(f"{v:g}")
                else:
                    row.append(str(v))
            fp.write(",".join(row) + "\n")

    # -- wide views -------------------------------------------------------

    def _stat_cols(self):
        cols = []
        for p in self.design.p:
            for b in self.design.b:
                cols.append(("ftilde", p, b, f"p{p},b={b:g}"))
        if self.design.with_wp:
            for b in self.design.b:
                cols.append(("wp", 0, b, f"wp,b={b:g}"))
        return cols

    def size_table(self):
        """Max-over-rho rejection rate per (process, n) and test column."""
        cols = self._stat_cols()
        best = {}
        for r in self.records:
            key = (r["proc"], r["n"], r["stat"], r["p"], r["b"])
            best[key] = max(best.get(key, 0.0), r["rate"])
        headers = ["process", "n"] + [c[-1] for c in cols]
        rows = []
        for spec in self.design.processes:
            for n in self.design.n:
                row = [spec.label(), n]
                for stat, p, b, _ in cols:
                    row.append(best.get((spec.label(), n, stat, p, b)))
                rows.append(row)
        return headers, rows

    def power_table(self):
        """Size-adjusted power per (process, n, alternative) and test column."""
        cols = self._stat_cols()
        adj = {}
        for r in self.records:
            if r["mode"] != "power":
                continue
            adj[(r["proc"], r["n"], r["alt"], r["stat"], r["p"], r["b"])] = r["adj_rate"]
        headers = ["process", "n", "alternative"] + [c[-1] for c in cols]
        rows = []
        for spec in self.design.processes:
            for n in self.design.n:
                for alt in self.design.alternatives:
                    row = [spec.label(), n, alt.label()]
                    for stat, p, b, _ in cols:
                        row.append(adj.get((spec.label(), n, alt.label(), stat, p, b)))
                    rows.append(row)
        return headers, rows

    def table(self):
        return self.size_table() if self.mode == "size" else self.power_table()

    def table_csv(self, fp) -> None:
        headers, rows = self.table()
        fp.write(",".join(headers) + "\n")
        for row in rows:
            fp.write(",".join(_cell_str(v) for v in row) + "\n")

    def table_markdown(self) -> str:
        headers, rows = self.table()
        out = ["| " + " | ".join(headers) + " |",
               "|" + "|".join("---" for _ in headers) + "|"]
        for row in rows:
            out.append("| " + " | ".join(_cell_str(v) for v in row) + " |")
        return "\n".join(out) + "\n"


def _cell_str(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def run_size(design: McDesign, master_seed: int = 0, threads: int = 1) -> McResult:
    """Null rejection rates over the full (process, n, rho) grid."""
    cells = [(spec, n, rho, None)
             for spec in design.processes for n in design.n for rho in design.rho]
    sums, fails = _run_cells(cells, design, master_seed, threads)
    stats = _stat_list(design)
    res = McResult("size", design, master_seed)
    for i, (spec, n, rho, _) in enumerate(cells):
        neff = design.reps - fails[i]
        for k, (stat, p, b) in enumerate(stats):
            res.records.append({
                "mode": "size", "proc": spec.label(), "n": n, "rho": rho,
                "alt": "", "stat": stat, "p": p if stat == "ftilde" else "",
                "b": b, "rate": int(sums[i][k]) / neff,
                "rejects": int(sums[i][k]), "fails": fails[i], "reps": design.reps,
            })
    return res


def run_power(design: McDesign, master_seed: int = 0, threads: int = 1) -> McResult:
    """Raw and size-adjusted power at rho = rho_power, with a matched null run.

    The null rejection rate entering the size adjustment comes from the
    same design at the same rho with g1 = 0.
    """
    if not design.alternatives:
        raise ValueError("power run requires at least one alternative")
    design = replace(design, with_wp=True)
    cells = [(spec, n, design.rho_power, None)
             for spec in design.processes for n in design.n]
    cells += [(spec, n, design.rho_power, alt)
              for spec in design.processes for n in design.n
              for alt in design.alternatives]
    sums, fails = _run_cells(cells, design, master_seed, threads)
    stats = _stat_list(design)
    res = McResult("power", design, master_seed)
    null_rate = {}
    for i, (spec, n, rho, alt) in enumerate(cells):
        neff = design.reps - fails[i]
        for k, (stat, p, b) in enumerate(stats):
            rate = int(sums[i][k]) / neff
            rec = {
                "mode": "null" if alt is None else "power",
                "proc": spec.label(), "n": n, "rho": rho,
                "alt": "" if alt is None else alt.label(),
                "stat": stat, "p": p if stat == "ftilde" else "", "b": b,
                "rate": rate, "rejects": int(sums[i][k]),
                "fails": fails[i], "reps": design.reps,
            }
            if alt is None:
                null_rate[(spec.label(), n, stat, p, b)] = rate
            else:
                nr = null_rate[(spec.label(), n, stat, p, b)]
                rec["null_rate"] = nr
                rec["adj_rate"] = size_adjust(rate, nr, design.alpha)
            res.records.append(rec)
    return res
