"""Command-line interface: filter design, eigensolve, filter benchmark, problem generation.

Every command prints a JSON run manifest on stdout.  Failures print a single
JSON line ``{"error": ..., "message": ...}`` on stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .eigensolver import SolveConfig, relative_eigengap, subspace_iteration, write_vectors
from .filter_design import (
    CONTOUR_KINDS,
    SpectralWindow,
    baseline_contour_poles,
    build_filter_design,
    choose_order,
    error_estimate,
    omega_samples,
    write_design_json,
    write_error_curve_csv,
)
from .problems_io import HamiltonianSpec, gen_hamiltonian, read_matrix_market, screen_hamiltonian, write_matrix_market
from .sparse_linalg import SparsePencil, thread_count

BENCH_METHODS = {"zolo": None, "citz": "trapezoid", "cigq": "gauss_legendre"}


class CliError(Exception):
    """User-facing failure; reported as one JSON line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, code=2)


def _fail(kind: str, message: str, code: int = 1):
    sys.stderr.write(json.dumps({"error": kind, "message": " ".join(str(message).split())}) + "\n")
    sys.exit(code)


def _floats(text: str, count: int | None = None, name: str = "value") -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise CliError(f"{name} must be comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise CliError(f"{name} needs {count} comma-separated numbers, got {len(vals)}")
    return vals


def _window(args) -> SpectralWindow:
    am, ap, bm, bp = _floats(args.window, 4, "--window")
    a = b = None
    if getattr(args, "interval", None):
        a, b = _floats(args.interval, 2, "--interval")
    return SpectralWindow.from_gaps(am, ap, bm, bp, a=a, b=b)


def _manifest(command: str, args, timings: dict, outputs: dict, extra: dict | None = None) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    out = {
        "command": command,
        "config": config,
        "timings": timings,
        "outputs": outputs,
        "version": __version__,
        "python": platform.python_version(),
        "seed": getattr(args, "seed", None),
        "threads": thread_count(),
    }
    if extra:
        out.update(extra)
    return out


def _emit(manifest: dict, args) -> None:
    text = json.dumps(manifest, default=_jsonable)
    if getattr(args, "manifest", None):
        Path(args.manifest).write_text(text + "\n")
    print(text)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def cmd_design(args) -> dict:
    t0 = time.perf_counter()
    window = _window(args)
    r = args.r if args.r is not None else choose_order(window, args.tol)
    design = build_filter_design(window, r)
    est = error_estimate(design)
    outputs = {}
    if args.out:
        outputs["design"] = str(write_design_json(design, args.out))
    if args.curve:
        outputs["curve"] = str(write_error_curve_csv(design, args.curve, args.samples))
    timings = {"total_s": time.perf_counter() - t0}
    summary = {
        "r": design.r,
        "ell1": design.ell1,
        "ell2": design.ell2,
        "delta0": design.delta0,
        "measured_error": est.measured,
        "goncar_upper": est.upper,
        "n_poles": len(design.poles),
    }
    return _manifest("design", args, timings, outputs, {"result": summary})


def _load_pencil(args) -> SparsePencil:
    a = read_matrix_market(args.a)
    b = read_matrix_market(args.b) if args.b else None
    return SparsePencil(a, b)


def cmd_solve(args) -> dict:
    t0 = time.perf_counter()
    pencil = _load_pencil(args)
    window = _window(args)
    config = SolveConfig(
        n_lambda=args.nev,
        oversample_k=args.oversample,
        r=args.r,
        tol=args.tol,
        max_subspace_iters=args.max_iters,
        gmres_tol=args.gmres_tol,
        gmres_max=args.gmres_max,
        seed=args.seed,
        method=args.method,
    )
    t_load = time.perf_counter() - t0
    result = subspace_iteration(pencil, window, config)
    outputs = {"result": str(result.write_json(args.out))}
    if args.vectors:
        outputs["vectors"] = str(write_vectors(args.vectors, result.vectors))
    timings = {
        "load_s": t_load,
        "t_fact_s": result.stats.factorization_time,
        "t_iter_s": result.stats.iteration_time,
        "total_s": time.perf_counter() - t0,
    }
    summary = {
        "n_found": int(len(result.lambdas)),
        "residual": result.residual,
        "converged": result.converged,
        "r": result.r,
        "n_iter": result.stats.n_iter,
        "n_solv": result.stats.n_solv,
    }
    return _manifest("solve", args, timings, outputs, {"result": summary})


def bench_rows(gap: float, factorizations, methods, num: int = 4000) -> list[dict]:
    """L-infinity filter errors on eigengaps of width ``gap`` around -1 and 1."""
    g = 0.5 * gap
    window = SpectralWindow.from_gaps(-1.0 - g, -1.0 + g, 1.0 - g, 1.0 + g)
    x = omega_samples(window, num)
    target = window.indicator(x)
    rows = []
    for method in methods:
        if method not in BENCH_METHODS:
            raise CliError(f"unknown method {method!r}; choose from {sorted(BENCH_METHODS)}")
        for f in factorizations:
            if method == "zolo":
                design = build_filter_design(window, f)
                est = error_estimate(design, num)
                err, r, poles = est.measured, f, 2 * f
            else:
                ps = baseline_contour_poles(BENCH_METHODS[method], 2 * f, (window.a, window.b))
                err = float(np.max(np.abs(ps.eval(x) - target)))
                r, poles = "", 2 * f
            rows.append({"method": method, "r": r, "poles": poles, "factorizations": f, "linf_error": err})
    return rows


def cmd_bench(args) -> dict:
    t0 = time.perf_counter()
    facts = [int(v) for v in _floats(args.factorizations, None, "--factorizations")]
    if any(f < 1 for f in facts):
        raise CliError("--factorizations must be positive integers")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    rows = bench_rows(args.gaps, facts, methods, args.samples)
    with open(args.out, "w", newline="") as fh:
        out = csv.DictWriter(fh, fieldnames=["method", "r", "poles", "factorizations", "linf_error"])
        out.writeheader()
        for row in rows:
            out.writerow({**row, "linf_error": repr(row["linf_error"])})
    timings = {"total_s": time.perf_counter() - t0}
    return _manifest("bench", args, timings, {"bench": args.out}, {"result": {"rows": len(rows)}})


def cmd_gen_ham(args) -> dict:
    t0 = time.perf_counter()
    extra = {}
    if args.target_gap_range:
        lo, hi = _floats(args.target_gap_range, 2, "--target-gap-range")
        if args.nev is None:
            raise CliError("--target-gap-range requires --nev")
        if args.n > 16:
            raise CliError("gap screening uses a dense eigensolve and is limited to n <= 16")
        spec, pencil, gap, tries = screen_hamiltonian(args.n, args.seed, args.nev, (lo, hi), args.max_tries)
        extra = {"delta_lambda": gap, "tries": tries, "potential_seed": spec.seed}
    else:
        spec = HamiltonianSpec(n=args.n, seed=args.seed)
        pencil = gen_hamiltonian(spec)
        extra = {"potential_seed": spec.seed}
    comments = [f"3D Hamiltonian, n = {spec.n}, N = {spec.size}, potential seed {spec.seed}"]
    for w in spec.resolved_wells():
        comments.append(f"well center {w.center[0]!r} {w.center[1]!r} {w.center[2]!r} depth {w.depth!r}")
    write_matrix_market(args.out, pencil.a_mat, comments=comments)
    timings = {"total_s": time.perf_counter() - t0}
    return _manifest("gen-ham", args, timings, {"matrix": args.out}, {"result": {"N": spec.size, **extra}})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zoloeig", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"zoloeig {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    win_help = "gap ends a-,a+,b-,b+ (use --window=... when the first value is negative; -inf/inf allowed)"

    d = sub.add_parser("design", help="build a filter and export it")
    d.add_argument("--window", required=True, help=win_help)
    d.add_argument("--interval", help="a,b (defaults to the gap midpoints)")
    order = d.add_mutually_exclusive_group()
    order.add_argument("--r", type=int, help="filter order")
    order.add_argument("--tol", type=float, default=1e-12, help="error target for automatic order (default 1e-12)")
    d.add_argument("--out", help="design JSON path")
    d.add_argument("--curve", help="error-curve CSV path")
    d.add_argument("--samples", type=int, default=2001, help="rows of the error curve")
    d.add_argument("--manifest", help="also write the run manifest here")
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("solve", help="eigenpairs inside an interval")
    s.add_argument("--a", required=True, help="Matrix Market file for A")
    s.add_argument("--b", help="Matrix Market file for B (identity when omitted)")
    s.add_argument("--window", required=True, help=win_help)
    s.add_argument("--interval", help="a,b (defaults to the gap midpoints)")
    s.add_argument("--nev", type=int, required=True, help="number of eigenvalues in the interval")
    s.add_argument("--oversample", type=int, default=1)
    s.add_argument("--r", type=int, help="filter order (automatic when omitted)")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iters", type=int, default=5)
    s.add_argument("--gmres-tol", type=float, default=1e-12)
    s.add_argument("--gmres-max", type=int, default=50)
    s.add_argument("--method", choices=("band", "dense"), default="band")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="result JSON path")
    s.add_argument("--vectors", help="binary eigenvector file")
    s.add_argument("--manifest", help="also write the run manifest here")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="filter error against contour baselines")
    b.add_argument("--gaps", type=float, required=True, help="full eigengap width around -1 and 1")
    b.add_argument("--factorizations", default="4", help="comma-separated factorization counts")
    b.add_argument("--methods", default="zolo,citz,cigq")
    b.add_argument("--samples", type=int, default=4000)
    b.add_argument("--out", required=True, help="CSV path")
    b.add_argument("--manifest", help="also write the run manifest here")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen-ham", help="write a 3D Hamiltonian test matrix")
    g.add_argument("--n", type=int, required=True, help="grid points per dimension")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="Matrix Market path")
    g.add_argument("--target-gap-range", help="lo,hi relative eigengap for rejection sampling")
    g.add_argument("--nev", type=int, help="eigenvalue count defining the eigengap")
    g.add_argument("--max-tries", type=int, default=200)
    g.add_argument("--manifest", help="also write the run manifest here")
    g.set_defaults(func=cmd_gen_ham)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        thread_count()
        manifest = args.func(args)
    except CliError as exc:
        _fail("CliError", str(exc))
    except (ValueError, ArithmeticError, RuntimeError, OSError, np.linalg.LinAlgError) as exc:
        _fail(type(exc).__name__, str(exc))
    _emit(manifest, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
