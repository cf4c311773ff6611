"""JSON export of a filter design and CSV export of its error curve."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .design import FilterDesign, eval_filter_scalar

__all__ = ["design_to_dict", "write_design_json", "error_curve", "write_error_curve_csv"]


def _complex_list(z) -> list[dict]:
    return [{"re": float(v.real), "im": float(v.imag)} for v in np.asarray(z, dtype=complex)]


def design_to_dict(design: FilterDesign) -> dict:
    """Plain-JSON representation; infinite window ends are written as "inf"/"-inf"."""
    mob = design.mobius
    return {
        "window": design.window.to_dict(),
        "gamma": mob.gamma,
        "alpha": mob.alpha,
        "beta": mob.beta,
        "ell1": mob.ell1,
        "ell2": design.ell2,
        "inner": {
            "r": design.r,
            "c": design.inner.c.tolist(),
            "M": design.inner.big_m,
            "zmax": design.inner_zmax,
            "a": design.inner_a.tolist(),
        },
        "outer": {
            "r": design.r,
            "c": design.outer.c.tolist(),
            "M": design.outer.big_m,
            "a": design.outer_a.tolist(),
        },
        "poles": _complex_list(design.poles),
        "weights": _complex_list(design.weights),
        "constant_term": design.constant_term,
        "delta0": design.delta0,
    }


def write_design_json(design: FilterDesign, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(design_to_dict(design), indent=2) + "\n")
    return path


def error_curve(design: FilterDesign, samples: int = 2001) -> np.ndarray:
    """Rows (x, R(x), S(x), |R - S|) on an even grid over [a- - span, b+ + span].

    An infinite outer end is replaced by one span beyond the adjacent finite end.
    """
    samples = int(samples)
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    w = design.window
    span = w.span
    lo = w.a_minus - span if math.isfinite(w.a_minus) else w.a_plus - 2.0 * span
    hi = w.b_plus + span if math.isfinite(w.b_plus) else w.b_minus + 2.0 * span
    x = np.linspace(lo, hi, samples) if samples > 1 else np.array([0.5 * (w.a + w.b)])
    # the Moebius pole is a removable point of R; nudge it off by one ulp
    beta = design.mobius.beta
    x = np.where(x == beta, np.nextafter(beta, np.inf), x)
    r = np.atleast_1d(eval_filter_scalar(design, x))
    s = w.indicator(x)
    return np.column_stack([x, r, s, np.abs(r - s)])


def write_error_curve_csv(design: FilterDesign, path, samples: int = 2001) -> Path:
    path = Path(path)
    rows = error_curve(design, samples)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "R", "S", "error"])
        for row in rows:
            out.writerow([repr(float(v)) for v in row])
    return path
