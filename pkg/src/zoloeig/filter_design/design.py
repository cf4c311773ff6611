"""Composed Zolotarev rectangular filter R_ab(x) = (Z(Zhat(T(x); l1); l2) + 1) / 2."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .mobius import MobiusFit, fit_mobius
from .window import SpectralWindow
from .zolotarev import (
    ZolotarevCoeffs,
    gontchar_bracket,
    partial_fraction_weights,
    rescaled_eval,
    zolotarev_coeffs,
    zolotarev_eval,
)

__all__ = [
    "MAX_FILTER_ORDER",
    "MAX_DESIGN_ORDER",
    "FilterDesign",
    "ErrorEstimate",
    "build_filter_design",
    "eval_filter_scalar",
    "eval_inner_pole_form",
    "error_estimate",
    "choose_order",
    "omega_samples",
]

# automatic order selection stops here; explicit orders may go up to MAX_DESIGN_ORDER
MAX_FILTER_ORDER = 8
MAX_DESIGN_ORDER = 16


@dataclass(frozen=True)
class FilterDesign:
    """Everything needed to apply R_ab: Moebius map, inner/outer Zolotarev data, poles.

    ``poles``/``weights`` hold the r inner poles with positive imaginary part and
    their weights; the conjugate pairs are implicit.  ``constant_term`` already
    includes the rescaled normalisation ``inner_mhat``.
    """

    window: SpectralWindow
    mobius: MobiusFit
    r: int
    inner: ZolotarevCoeffs
    inner_zmax: float
    inner_mhat: float
    inner_a: np.ndarray
    ell2: float
    outer: ZolotarevCoeffs
    outer_a: np.ndarray
    poles: np.ndarray
    weights: np.ndarray
    constant_term: float
    delta0: float

    @property
    def outer_shifts(self) -> np.ndarray:
        """The 2r shifts +i sqrt(c_{2j-1}), -i sqrt(c_{2j-1}) of the outer systems."""
        s = 1j * np.sqrt(self.outer.c_odd)
        return np.concatenate([s, -s])

    @property
    def ell1(self) -> float:
        return self.mobius.ell1


def build_filter_design(window: SpectralWindow, r: int) -> FilterDesign:
    """Construct the composed filter of order r for ``window``."""
    r = int(r)
    if not (1 <= r <= MAX_DESIGN_ORDER):
        raise ValueError(f"filter order r must lie in [1, {MAX_DESIGN_ORDER}], got {r}")
    mob = fit_mobius(window)
    inner = zolotarev_coeffs(r, mob.ell1)
    zmax = inner.zmax
    mhat = inner.big_m / zmax
    ell2 = float(rescaled_eval(inner, mob.ell1))
    outer = zolotarev_coeffs(r, ell2)

    a_hat = partial_fraction_weights(inner)
    a_out = partial_fraction_weights(outer)

    g, al, be = mob.gamma, mob.alpha, mob.beta
    sq = np.sqrt(inner.c_odd)
    den = g + 1j * sq
    poles = (g * al + 1j * sq * be) / den
    weights = a_hat * (poles - be) / (2.0 * den)
    # store the member of each conjugate pair that lies in the upper half plane
    flip = poles.imag < 0
    poles = np.where(flip, poles.conj(), poles)
    weights = np.where(flip, weights.conj(), weights)
    constant = mhat * float(np.sum(a_hat * g / (g * g + inner.c_odd)))

    return FilterDesign(
        window=window,
        mobius=mob,
        r=r,
        inner=inner,
        inner_zmax=zmax,
        inner_mhat=mhat,
        inner_a=a_hat,
        ell2=ell2,
        outer=outer,
        outer_a=a_out,
        poles=poles,
        weights=weights,
        constant_term=constant,
        # T maps Omega onto [-1,-l1] U [l1,1], where the composition errs by delta(outer)
        delta0=0.5 * outer.delta,
    )


def eval_filter_scalar(design: FilterDesign, x):
    """R_ab(x) by direct composition.  Raises at the Moebius pole x = beta."""
    x = np.asarray(x, dtype=float)
    if np.any(x == design.mobius.beta):
        raise ZeroDivisionError("R_ab evaluated at the Moebius pole beta")
    y = design.mobius(x)
    inner = rescaled_eval(design.inner, y)
    out = 0.5 * (zolotarev_eval(design.outer, inner) + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def eval_inner_pole_form(design: FilterDesign, x):
    """Zhat_{2r}(T(x); l1) from the pole/weight sum (the form applied to matrices)."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape)
    for s, w in zip(design.poles, design.weights):
        acc = acc + 2.0 * np.real(w / (x - s))
    out = design.constant_term + design.inner_mhat * acc
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ErrorEstimate:
    rho: float
    lower: float
    upper: float
    measured: float


def omega_samples(window: SpectralWindow, num: int = 4000, mobius: MobiusFit | None = None) -> np.ndarray:
    """Dense sample of Omega = (-inf, a-] U [a+, b-] U [b+, inf).

    Uniform points on the finite part (clipped to one span beyond the outer gap
    ends), geometric clusters at the four gap ends, 1/t tails, and, if a Moebius
    map is given, preimages of a dense grid on [-1,-l1] U [l1,1].
    """
    am, ap, bm, bp = window.gaps
    span = window.span
    pts = [np.linspace(ap, bm, num)]
    offsets = np.geomspace(1e-14 * max(span, 1.0), span, num // 4)
    pts += [ap + offsets[offsets <= bm - ap], bm - offsets[offsets <= bm - ap]]
    t = np.linspace(1.0, 1e-12, num // 4)
    if math.isfinite(am):
        pts += [np.linspace(am - span, am, num // 2), am - offsets, am - span / t]
    if math.isfinite(bp):
        pts += [np.linspace(bp, bp + span, num // 2), bp + offsets, bp + span / t]
    if mobius is not None:
        ell = mobius.ell1
        y = np.geomspace(ell, 1.0, num)
        y = np.concatenate([y, 1.0 - (1.0 - ell) * np.geomspace(1e-12, 1.0, num // 4)])
        y = np.concatenate([y, -y])
        xs = mobius.inverse(y)
        pts.append(xs[np.isfinite(xs)])
    x = np.concatenate(pts)
    inside = (x >= ap) & (x <= bm)
    outside = (x <= am) | (x >= bp)
    x = x[(inside | outside) & np.isfinite(x)]
    if mobius is not None:
        x = x[x != mobius.beta]
    return np.unique(x)


def error_estimate(design: FilterDesign, num: int = 4000) -> ErrorEstimate:
    """Goncar bracket for degree (2r)^2 at l1 and the sampled sup |S_ab - R_ab| on Omega."""
    rho, lower, upper = gontchar_bracket(design.ell1, (2 * design.r) ** 2)
    x = omega_samples(design.window, num, design.mobius)
    err = np.abs(design.window.indicator(x) - eval_filter_scalar(design, x))
    return ErrorEstimate(rho=rho, lower=lower, upper=upper, measured=float(err.max()))


def choose_order(window: SpectralWindow, eps: float) -> int:
    """Smallest r in [1, 8] whose Goncar upper bound at l1 is <= eps."""
    if not (1e-16 <= eps < 1.0):
        raise ValueError(f"tolerance must lie in [1e-16, 1), got {eps!r}")
    ell1 = fit_mobius(window).ell1
    for r in range(1, MAX_FILTER_ORDER + 1):
        _, _, upper = gontchar_bracket(ell1, (2 * r) ** 2)
        if upper <= eps:
            return r
    warnings.warn(
        f"no order up to {MAX_FILTER_ORDER} meets tolerance {eps:g}; using r = {MAX_FILTER_ORDER}",
        RuntimeWarning,
        stacklevel=2,
    )
    return MAX_FILTER_ORDER
