"""Moebius map T(x) = gamma (x - alpha)/(x - beta) sending the gap ends to -1, 1, l1, -l1."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .window import SpectralWindow, WindowError

__all__ = ["MobiusFit", "InfeasibleWindowError", "fit_mobius", "cross_ratio_ell"]

_RESIDUAL_TOL = 1e-10


class InfeasibleWindowError(WindowError):
    """No Moebius map with ell1 in (0, 1) fits the window."""


@dataclass(frozen=True)
class MobiusFit:
    gamma: float
    alpha: float
    beta: float
    ell1: float

    def __call__(self, x):
        """T(x); T(+-inf) = gamma."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.gamma * (x - self.alpha) / (x - self.beta)
        out = np.where(np.isinf(x), self.gamma, out)
        return float(out) if out.ndim == 0 else out

    def inverse(self, y):
        """T^{-1}(y) = (beta y - gamma alpha)/(y - gamma); +inf at y = gamma."""
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.beta * y - self.gamma * self.alpha) / (y - self.gamma)
        out = np.where(y == self.gamma, np.inf, out)
        return float(out) if out.ndim == 0 else out

    def residuals(self, window: SpectralWindow) -> np.ndarray:
        """|T(a-)+1|, |T(a+)-1|, |T(b-)-l1|, |T(b+)+l1|."""
        targets = (-1.0, 1.0, self.ell1, -self.ell1)
        return np.array([abs(self(x) - t) for x, t in zip(window.gaps, targets)])


def cross_ratio_ell(window: SpectralWindow) -> float:
    """ell1 from invariance of the cross ratio under T.

    ((a- - b-)(a+ - b+)) / ((a- - b+)(a+ - b-)) = ((1 + l)/(1 - l))^2.  Writing the
    left side as 1 + eps, with eps = (a+ - a-)(b+ - b-) / ((b+ - a-)(b- - a+)),
    gives l = eps / (1 + sqrt(1 + eps))^2 without cancellation.
    """
    am, ap, bm, bp = window.gaps
    inner = bm - ap
    if inner <= 0.0:
        raise InfeasibleWindowError("a_plus == b_minus leaves no room for the filter (ell1 = 1)")
    if math.isinf(am) and math.isinf(bp):
        raise InfeasibleWindowError("both outer gap ends infinite: T(-inf) and T(+inf) would differ")
    if math.isinf(am):
        eps = (bp - bm) / inner
    elif math.isinf(bp):
        eps = (ap - am) / inner
    else:
        eps = (ap - am) * (bp - bm) / ((bp - am) * inner)
    q = math.sqrt(1.0 + eps)
    return eps / (1.0 + q) ** 2


def _residual_allowance(fit: MobiusFit, window: SpectralWindow) -> np.ndarray:
    """1e-10, widened where evaluating T amplifies rounding of x near the pole beta."""
    eps = np.finfo(float).eps
    out = []
    for x in window.gaps:
        if math.isinf(x):
            out.append(_RESIDUAL_TOL)
            continue
        cond = (abs(x) + abs(fit.beta)) / abs(x - fit.beta) + (abs(x) + abs(fit.alpha)) / abs(x - fit.alpha)
        out.append(max(_RESIDUAL_TOL, 1e3 * eps * cond * abs(fit(x))))
    return np.array(out)


def fit_mobius(window: SpectralWindow) -> MobiusFit:
    """Fit T to the window: ell1 by cross ratio, then (gamma, gamma*alpha, beta) linearly."""
    ell1 = cross_ratio_ell(window)
    if not (0.0 < ell1 < 1.0):
        raise InfeasibleWindowError(f"ell1 = {ell1!r} outside (0, 1)")

    am, ap, bm, bp = window.gaps
    # solve in centred/scaled coordinates, then map alpha, beta back
    lo = am if math.isfinite(am) else ap
    hi = bp if math.isfinite(bp) else bm
    centre = 0.5 * (lo + hi)
    scale = 0.5 * (hi - lo)

    # T(b+) = -l1 is left out of the solve and verified as a residual
    rows, rhs = [], []
    for x, t in ((am, -1.0), (ap, 1.0), (bm, ell1)):
        if math.isinf(x):
            # T(+-inf) = gamma
            rows.append([1.0, 0.0, 0.0])
            rhs.append(t)
        else:
            xs = (x - centre) / scale
            # gamma x - (gamma alpha) + t beta = t x
            rows.append([xs, -1.0, t])
            rhs.append(t * xs)
    try:
        gamma, galpha, beta_s = np.linalg.solve(np.array(rows), np.array(rhs))
    except np.linalg.LinAlgError as exc:
        raise InfeasibleWindowError(f"Moebius system singular: {exc}") from None
    if gamma == 0.0:
        raise InfeasibleWindowError("degenerate Moebius map (gamma = 0)")
    alpha = centre + scale * (galpha / gamma)
    beta = centre + scale * beta_s
    fit = MobiusFit(gamma=float(gamma), alpha=float(alpha), beta=float(beta), ell1=ell1)

    res = fit.residuals(window)
    if np.any(res > _residual_allowance(fit, window)):
        raise InfeasibleWindowError(f"Moebius fit residuals too large: {res}")
    return fit
