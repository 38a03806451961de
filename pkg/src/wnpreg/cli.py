"""Command line interface.

Subcommands
-----------
simulate   draw a path from a process spec, emit CSV (t,x)
test       run the specification test (and optionally the pair test) on a CSV
mc-size    null rejection-rate table over a design grid
mc-power   raw and size-adjusted power table
limits     convergence diagnostics of path functionals against limit oracles
oracle     print the package's independently-derived reference constants

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .kernels import KERNEL_NAMES, get_kernel
from .limits import (FUNCTIONS, FunctionalSpec, convergence_check,
                     limit_additive, limit_kernel)
from .mc import McDesign, run_power, run_size
from .procgen import ProcessSpec, exact_sd, frac_coeffs, presample_len, simulate_path
from .rng import stream
from .spectest import chi2_quantile, f_tilde_test, wp_test


def _read_json(path: str) -> dict:
    with open(path) as fp:
        return json.load(fp)


def _spec_from_args(args) -> ProcessSpec:
    if args.config:
        return ProcessSpec.from_dict(_read_json(args.config))
    if args.spec:
        return ProcessSpec.from_json(args.spec)
    raise SystemExit2("either --config FILE or --spec JSON is required")


class SystemExit2(Exception):
    """Usage error surfaced with exit code 2."""


def _out_fp(path: str | None):
    return open(path, "w") if path else sys.stdout


# -- simulate ---------------------------------------------------------------

def _cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    rng = stream(args.seed, "simulate", spec.label(), args.n)
    xi = rng.standard_normal(args.n + presample_len(spec, args.n))
    path = simulate_path(spec, args.n, xi)
    fp = _out_fp(args.out)
    try:
        path.write_csv(fp)
    finally:
        if fp is not sys.stdout:
            fp.close()
    print(f"n={path.n} beta_n={path.beta:.6f} kind={spec.kind}", file=sys.stderr)
    return 0


# -- test -------------------------------------------------------------------

def _read_yx(path: str):
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    if "y" not in names or "x" not in names:
        raise SystemExit2(f"{path}: need CSV columns 'y' (response) and 'x' "
                          f"(lagged regressor); found {list(names)}")
    return np.asarray(data["y"], dtype=float), np.asarray(data["x"], dtype=float)


def _cmd_test(args) -> int:
    y, xlag = _read_yx(args.data)
    n = len(y) + 1
    h = args.h if args.h is not None else float(n) ** args.b
    res = f_tilde_test(y, xlag, h=h, kernel=args.kernel, p=args.p, alpha=args.alpha)
    out = {"n_obs": len(y), "h": h, "spec_test": json.loads(res.to_json())}
    if args.wp:
        wp = wp_test(y, xlag, h=h, kernel=args.kernel, alpha=args.alpha)
        out["pair_test"] = json.loads(wp.to_json())
    fp = _out_fp(args.out)
    try:
        json.dump(out, fp, indent=2)
        fp.write("\n")
    finally:
        if fp is not sys.stdout:
            fp.close()
    return 0


# -- mc-size / mc-power -----------------------------------------------------

def _write_mc(result, outdir: str, fmt: str, mode: str) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / f"{mode}_raw.csv", "w") as fp:
        result.to_csv(fp)
    if fmt in ("csv", "both"):
        with open(outdir / f"{mode}_table.csv", "w") as fp:
            result.table_csv(fp)
    if fmt in ("md", "both"):
        (outdir / f"{mode}_table.md").write_text(result.table_markdown())


def _cmd_mc(args, power: bool) -> int:
    design = McDesign.from_dict(_read_json(args.config))
    t0 = time.time()
    if power:
        result = run_power(design, master_seed=args.seed, threads=args.threads)
    else:
        result = run_size(design, master_seed=args.seed, threads=args.threads)
    mode = "power" if power else "size"
    _write_mc(result, args.out, args.format, mode)
    print(f"{mode} run: {len(result.records)} records in {time.time() - t0:.1f}s "
          f"(backend={BACKEND}, threads={args.threads}, seed={args.seed})",
          file=sys.stderr)
    return 0


# -- limits -----------------------------------------------------------------

def _cmd_limits(args) -> int:
    if args.config:
        cfg = _read_json(args.config)
    else:
        cfg = {"process": {"kind": "mi", "alpha_kappa": 0.5},
               "functional": {"kind": "additive", "f": "square"},
               "n": [500, 2000], "reps": 200}
    spec = ProcessSpec.from_dict(cfg["process"])
    func = FunctionalSpec.from_dict(cfg["functional"])
    report = convergence_check(spec, func, cfg["n"], int(cfg["reps"]),
                               master_seed=args.seed)
    if args.out:
        with open(args.out, "w") as fp:
            report.to_csv(fp)
    sys.stdout.write(report.to_text())
    return 0


# -- oracle -----------------------------------------------------------------

def _cmd_oracle(args) -> int:
    rows = []

    psi = frac_coeffs(0.5, 6)
    rows.append(("frac_coeffs(0.5)[0:4]", ", ".join(f"{v:.6f}" for v in psi[:4])))
    rows.append(("exact_sd(fr2 d=1, n=100)", f"{exact_sd(ProcessSpec('fr2', d=1.0), 100):.10f}"))
    rows.append(("sqrt(100)", f"{np.sqrt(100):.10f}"))
    sp = ProcessSpec("mi", alpha_kappa=0.5)
    rows.append(("exact_sd(mi ak=0.5, n=100)", f"{exact_sd(sp, 100):.10f}"))
    rho = sp.rho_n(100)
    rows.append(("mi closed form", f"{np.sqrt((1 - rho ** 200) / (1 - rho ** 2)):.10f}"))
    rows.append(("chi2_quantile(2, 0.90)", f"{chi2_quantile(2, 0.90):.7f}"))
    rows.append(("chi2_quantile(1, 0.90)", f"{chi2_quantile(1, 0.90):.7f}"))
    for name in KERNEL_NAMES:
        rows.append((f"Q11[{name}]", f"{get_kernel(name).q11:.8f}"))
    rows.append(("1/(2*sqrt(pi))", f"{1.0 / (2.0 * np.sqrt(np.pi)):.8f}"))
    rows.append(("limit_additive(square)", f"{limit_additive(FUNCTIONS['square']):.8f}"))
    rows.append(("limit_kernel(gaussian, 0)", f"{limit_kernel('gaussian', 0.0):.8f}"))
    rows.append(("1/sqrt(2*pi)", f"{1.0 / np.sqrt(2 * np.pi):.8f}"))

    if args.format == "csv":
        print("quantity,value")
        for k, v in rows:
            print(f"{k},\"{v}\"")
    else:
        w = max(len(k) for k, _ in rows)
        for k, v in rows:
            print(f"{k:<{w}}  {v}")
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wnpreg",
        description="Simulation and persistence-robust specification testing "
                    "for weakly nonstationary time series.")
    ap.add_argument("--version", action="version", version=f"wnpreg {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="simulate a process path to CSV")
    ps.add_argument("--config", help="JSON file with a process spec")
    ps.add_argument("--spec", help="inline process spec JSON")
    ps.add_argument("--n", type=int, required=True, help="sample size")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", help="output CSV (default stdout)")
    ps.set_defaults(fn=_cmd_simulate)

    pt = sub.add_parser("test", help="run the specification test on CSV data")
    pt.add_argument("--data", required=True,
                    help="CSV with columns y (response) and x (lagged regressor)")
    pt.add_argument("--h", type=float, help="bandwidth")
    pt.add_argument("--b", type=float, default=-0.1,
                    help="bandwidth exponent, h = n^b (default -0.1)")
    pt.add_argument("--p", type=int, default=17, help="number of evaluation points")
    pt.add_argument("--alpha", type=float, default=0.1)
    pt.add_argument("--kernel", default="gaussian", choices=KERNEL_NAMES)
    pt.add_argument("--wp", action="store_true", help="also run the pair test")
    pt.add_argument("--out", help="output JSON (default stdout)")
    pt.set_defaults(fn=_cmd_test)

    for mode in ("mc-size", "mc-power"):
        pm = sub.add_parser(mode, help=f"Monte Carlo {mode.split('-')[1]} table")
        pm.add_argument("--config", required=True, help="design JSON file")
        pm.add_argument("--seed", type=int, default=0)
        pm.add_argument("--threads", type=int, default=1)
        pm.add_argument("--out", required=True, help="output directory")
        pm.add_argument("--format", default="both", choices=("csv", "md", "both"))
        pm.set_defaults(fn=lambda a, _p=(mode == "mc-power"): _cmd_mc(a, _p))

    pl = sub.add_parser("limits", help="convergence check against limit oracles")
    pl.add_argument("--config", help="JSON: process, functional, n grid, reps")
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--out", help="write per-n CSV here")
    pl.set_defaults(fn=_cmd_limits)

    po = sub.add_parser("oracle", help="print reference constants")
    po.add_argument("--format", default="text", choices=("text", "csv"))
    po.set_defaults(fn=_cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit2 as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, TypeError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
