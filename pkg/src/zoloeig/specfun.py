"""Complete elliptic integral K and the Jacobi elliptic functions sn, cn, dn.

Both are computed from the arithmetic-geometric mean.  Routines that work
with moduli close to 1 accept the complementary modulus directly, which
avoids the cancellation in ``sqrt(1 - k**2)``.
"""
from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

__all__ = [
    "EllipticTriple",
    "agm",
    "complete_elliptic_K",
    "complete_elliptic_K_complement",
    "jacobi_elliptic",
    "sncndn",
]

_EPS = 2.220446049250313e-16
# moduli above this are clamped; they only arise from ill-posed windows
_K_CLAMP = 1.0 - 1e-12


class EllipticTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    if a < 0 or b < 0:
        raise ValueError("agm requires non-negative arguments")
    for _ in range(64):
        if abs(a - b) <= 4 * _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind for modulus ``k``.

    K(k) = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta) = pi / (2 AGM(1, k')).
    """
    k = float(k)
    if not (0.0 <= k < 1.0) or not math.isfinite(k):
        raise ValueError(f"modulus must lie in [0, 1), got {k!r}")
    return complete_elliptic_K_complement(math.sqrt((1.0 - k) * (1.0 + k)))


def complete_elliptic_K_complement(kc: float) -> float:
    """K at the modulus whose complementary modulus is ``kc`` (0 < kc <= 1)."""
    kc = float(kc)
    if not (0.0 < kc <= 1.0):
        raise ValueError(f"complementary modulus must lie in (0, 1], got {kc!r}")
    return math.pi / (2.0 * agm(1.0, kc))


def sncndn(u, k: float, kc: float | None = None):
    """Vectorised sn, cn, dn by the descending Landen (AGM) transformation.

    The backward sweep carries the ratio cn/sn rather than an angle, so cn and
    dn keep full relative accuracy when k is close to 1.  ``kc`` may be given
    to supply the complementary modulus exactly.  Returns three arrays shaped
    like ``u``.
    """
    u = np.asarray(u, dtype=float)
    if kc is None:
        kc = math.sqrt((1.0 - k) * (1.0 + k))
    if k == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)

    # forward AGM of (1, kc); the terms are kept for the backward sweep
    a_terms, b_terms = [], []
    a, b = 1.0, float(kc)
    for _ in range(40):
        a_terms.append(a)
        b_terms.append(b)
        mean = 0.5 * (a + b)
        if abs(a - b) <= _EPS * a:
            break
        a, b = mean, math.sqrt(a * b)
    phase = u * mean
    sin_p = np.sin(phase)
    near_zero = np.abs(sin_p) < 1e-3
    sn, cn, dn = _backward_ratio(np.where(near_zero, 1.0, phase), a_terms, b_terms, mean)
    if np.any(near_zero):
        # sn ~ 0 there, so cn ~ +-1 and the angle recurrence loses nothing
        sa, ca, da = _backward_angle(u, k, kc)
        sn = np.where(near_zero, sa, sn)
        cn = np.where(near_zero, ca, cn)
        dn = np.where(near_zero, da, dn)
    return sn, cn, dn


def _backward_ratio(phase, a_terms, b_terms, mean):
    sn = np.sin(phase)
    cn = np.cos(phase)
    dn = np.ones_like(phase)
    ratio = cn / sn * mean
    acc = cn / sn
    for ai, bi in zip(reversed(a_terms), reversed(b_terms)):
        acc = acc * ratio
        ratio = ratio * dn
        dn = (bi + acc) / (ai + acc)
        acc = ratio / ai
    mag = 1.0 / np.sqrt(ratio * ratio + 1.0)
    sn_out = np.copysign(mag, sn)
    return sn_out, ratio * sn_out, dn


def _backward_angle(u, k, kc):
    """Classical descending Landen with an arcsin sweep."""
    a = [1.0]
    c = [k]
    b = kc
    while abs(c[-1]) > _EPS * a[-1] and len(a) < 40:
        an, bn = a[-1], b
        a.append(0.5 * (an + bn))
        c.append(0.5 * (an - bn))
        b = math.sqrt(an * bn)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    phi_prev = phi
    for i in range(n, 0, -1):
        phi_prev = phi
        s = np.clip(c[i] / a[i] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(s))
    dn = np.sqrt(1.0 - (k * np.sin(phi)) ** 2) if n == 0 else np.cos(phi) / np.cos(phi_prev - phi)
    return np.sin(phi), np.cos(phi), dn


def jacobi_elliptic(u: float, k: float) -> EllipticTriple:
    """Jacobi elliptic functions ``(sn, cn, dn)`` of real ``u`` and modulus ``k`` in [0, 1]."""
    u = float(u)
    k = float(k)
    if not math.isfinite(u):
        raise ValueError(f"argument must be finite, got {u!r}")
    if not (0.0 <= k <= 1.0):
        raise ValueError(f"modulus must lie in [0, 1], got {k!r}")
    if k > _K_CLAMP:
        warnings.warn(
            f"modulus {k!r} clamped to {_K_CLAMP!r}; the window is nearly degenerate",
            RuntimeWarning,
            stacklevel=2,
        )
        k = _K_CLAMP
    sn, cn, dn = sncndn(u, k)
    return EllipticTriple(float(sn), float(cn), float(dn))
