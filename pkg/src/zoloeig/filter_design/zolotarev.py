"""Zolotarev's best rational approximation of sign(x) on [-1,-l] U [l,1].

Z_{2r}(x; l) = M x prod_{j<r}(x^2 + c_{2j}) / prod_{j<=r}(x^2 + c_{2j-1})
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..specfun import complete_elliptic_K_complement, sncndn

__all__ = [
    "MAX_ORDER",
    "MIN_ELL",
    "ZolotarevCoeffs",
    "zolotarev_coeffs",
    "zolotarev_eval",
    "rescaled_eval",
    "partial_fraction_weights",
    "partial_fraction_eval",
    "gontchar_rho",
    "gontchar_bracket",
]

# the composition checks need Z_{36} (r = 18) and beyond
MAX_ORDER = 32
# 1e-6 eigengaps around +-1 already give ell ~ 6e-14
MIN_ELL = 1e-16


@dataclass(frozen=True)
class ZolotarevCoeffs:
    """Coefficients and equioscillation data of Z_{2r}(.; ell)."""

    r: int
    ell: float
    c: np.ndarray
    big_m: float
    delta: float
    extrema: np.ndarray

    @property
    def c_odd(self) -> np.ndarray:
        """c_1, c_3, ..., c_{2r-1} (the denominator roots, negated)."""
        return self.c[0::2]

    @property
    def c_even(self) -> np.ndarray:
        return self.c[1::2]

    @property
    def zmax(self) -> float:
        """max of Z over [ell, 1]; equals 1 + delta by the normalisation."""
        return 1.0 + self.delta

    @property
    def zmin(self) -> float:
        return 1.0 - self.delta


def _product_form(c: np.ndarray, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    x2 = x * x
    out = x.copy()
    odd, even = c[0::2], c[1::2]
    for j in range(len(even)):
        out = out * ((x2 + even[j]) / (x2 + odd[j]))
    return out / (x2 + odd[-1])


def _extrema(r: int, ell: float, ellp: float, kp: float) -> np.ndarray:
    """Equioscillation points ell / dn(j K'/2r; ell'), j = 0..2r.

    The upper half uses x_j x_{2r-j} = ell, and the endpoints are exact.
    """
    j = np.arange(1, r + 1)
    _, _, dn = sncndn(j * kp / (2 * r), ellp, ell)
    lower = ell / dn
    lower[-1] = math.sqrt(ell)
    pts = np.concatenate([[ell], lower, ell / lower[: r - 1][::-1], [1.0]])
    return pts


def zolotarev_coeffs(r: int, ell: float) -> ZolotarevCoeffs:
    """Coefficients c_j, normalisation M and error delta of Z_{2r}(.; ell).

    c_j = ell^2 sn^2(j K'/2r; ell') / cn^2(j K'/2r; ell'), with K' = K(ell').
    The upper half is taken from the identity c_j c_{2r-j} = ell^2, which
    keeps full relative accuracy where cn is small.
    """
    r = int(r)
    ell = float(ell)
    if not (1 <= r <= MAX_ORDER):
        raise ValueError(f"order r must lie in [1, {MAX_ORDER}], got {r}")
    if not (MIN_ELL < ell < 1.0):
        raise ValueError(f"ell must lie in ({MIN_ELL:g}, 1), got {ell!r}")

    ellp = math.sqrt((1.0 - ell) * (1.0 + ell))
    kp = complete_elliptic_K_complement(ell)
    j = np.arange(1, r + 1)
    sn, cn, _ = sncndn(j * kp / (2 * r), ellp, ell)
    lower = ell * ell * (sn / cn) ** 2
    c = np.empty(2 * r - 1)
    c[:r] = lower
    c[r:] = ell * ell / lower[: r - 1][::-1]

    extrema = _extrema(r, ell, ellp, kp)
    vals = _product_form(c, extrema)
    fmin, fmax = float(vals.min()), float(vals.max())
    big_m = 2.0 / (fmin + fmax)
    delta = (fmax - fmin) / (fmax + fmin)
    return ZolotarevCoeffs(r=r, ell=ell, c=c, big_m=big_m, delta=delta, extrema=extrema)


def zolotarev_eval(coeffs: ZolotarevCoeffs, x):
    """Z_{2r}(x; ell) in product form.  Accepts scalars or arrays."""
    out = coeffs.big_m * _product_form(coeffs.c, x)
    return float(out) if np.ndim(out) == 0 else out


def rescaled_eval(coeffs: ZolotarevCoeffs, x):
    """Z_{2r}(x; ell) / max_{[ell,1]} Z_{2r}, so the maximum on [ell, 1] is 1."""
    out = coeffs.big_m * _product_form(coeffs.c, x) / coeffs.zmax
    return float(out) if np.ndim(out) == 0 else out


def partial_fraction_weights(coeffs: ZolotarevCoeffs) -> np.ndarray:
    """Weights a_j with Z_{2r}(x) = M x sum_j a_j / (x^2 + c_{2j-1})."""
    odd, even = coeffs.c_odd, coeffs.c_even
    r = coeffs.r
    b = np.empty(r - 1)
    for j in range(r - 1):
        prod = even[j] - odd[j]
        for k in range(r - 1):
            if k == j:
                continue
            den = odd[k] - odd[j]
            if den == 0.0:
                raise ArithmeticError("coincident Zolotarev coefficients")
            prod *= (even[k] - odd[j]) / den
        b[j] = prod
    a = np.empty(r)
    a[: r - 1] = b / (odd[-1] - odd[: r - 1])
    a[r - 1] = 1.0 - a[: r - 1].sum()
    return a


def partial_fraction_eval(coeffs: ZolotarevCoeffs, weights: np.ndarray, x):
    """Evaluate M x sum_j a_j/(x^2 + c_{2j-1}); complex x is allowed."""
    x = np.asarray(x)
    x2 = x * x
    acc = sum(w / (x2 + c) for w, c in zip(weights, coeffs.c_odd))
    return coeffs.big_m * x * acc


def gontchar_rho(ell: float) -> float:
    """rho(ell) = exp(pi K(mu') / (4 K(mu))) with mu = (1 - sqrt l)/(1 + sqrt l)."""
    return math.exp(_log_rho(ell))


def _log_rho(ell: float) -> float:
    s = math.sqrt(ell)
    mu = (1.0 - s) / (1.0 + s)
    if mu <= 0.0:
        return math.inf
    # complement of mu computed without cancellation: 1 - mu^2 = 4 s / (1 + s)^2
    mu_c = 2.0 * math.sqrt(s) / (1.0 + s)
    k_mu = complete_elliptic_K_complement(mu_c)
    k_mup = complete_elliptic_K_complement(mu)
    return math.pi * k_mup / (4.0 * k_mu)


def gontchar_bracket(ell: float, degree: int) -> tuple[float, float, float]:
    """(rho, lower, upper) with lower/upper = 2/(rho^degree +- 1)."""
    lr = _log_rho(ell)
    t = degree * lr
    if math.isinf(t):
        return math.inf, 0.0, 0.0
    e = math.exp(-t) if t < 745 else 0.0
    lower = 2.0 * e / (1.0 + e)
    upper = 2.0 / math.expm1(t) if t < 709 else 2.0 * e
    return math.exp(lr) if lr < 709 else math.inf, lower, upper
