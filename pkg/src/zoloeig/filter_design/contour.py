"""Contour-quadrature rational filters used as baselines.

The indicator of (a, b) is the contour integral (1/2 pi i) \\oint dz / (z - x) over
a circle through a and b.  Discretising it with p nodes z_j and weights w_j gives
f(x) = sum_j alpha_j / (x - z_j) with alpha_j = w_j / (2 pi i); the contour is
traversed clockwise so that f is close to +1 inside the circle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PoleSet", "baseline_contour_poles", "CONTOUR_KINDS"]

CONTOUR_KINDS = ("trapezoid", "gauss_legendre")


@dataclass(frozen=True)
class PoleSet:
    """Rational function constant + sum_j weights_j / (x - poles_j), all poles explicit."""

    poles: np.ndarray
    weights: np.ndarray
    constant: complex = 0.0

    def eval(self, x, real: bool = True):
        """Evaluate at real or complex ``x``; the real part is returned when ``real``."""
        x = np.asarray(x)
        acc = np.full(x.shape, self.constant, dtype=complex)
        for s, w in zip(self.poles, self.weights):
            acc = acc + w / (x - s)
        out = acc.real if real else acc
        return out.item() if out.ndim == 0 else out

    @property
    def size(self) -> int:
        return len(self.poles)


def baseline_contour_poles(kind: str, p: int, interval: tuple[float, float]) -> PoleSet:
    """Poles and weights of a p-point quadrature of the circle over ``interval``.

    ``trapezoid`` uses angles 2 pi (j + 1/2)/p; ``gauss_legendre`` puts p/2
    Gauss nodes on the upper semicircle and mirrors them by conjugation.
    """
    p = int(p)
    if p < 2 or p % 2:
        raise ValueError(f"pole count must be an even integer >= 2, got {p}")
    a, b = map(float, interval)
    if not b > a:
        raise ValueError(f"interval must satisfy a < b, got ({a}, {b})")
    centre = 0.5 * (a + b)
    radius = 0.5 * (b - a)

    if kind == "trapezoid":
        theta = 2.0 * np.pi * (np.arange(p) + 0.5) / p
        dtheta = np.full(p, 2.0 * np.pi / p)
    elif kind == "gauss_legendre":
        t, wt = np.polynomial.legendre.leggauss(p // 2)
        upper = 0.5 * np.pi * (t + 1.0)
        theta = np.concatenate([upper, -upper])
        dtheta = np.concatenate([0.5 * np.pi * wt, 0.5 * np.pi * wt])
    else:
        raise ValueError(f"unknown contour kind {kind!r}; expected one of {CONTOUR_KINDS}")

    e = np.exp(1j * theta)
    poles = centre + radius * e
    # z'(theta) = i R e^{i theta}; clockwise traversal flips the sign
    w = -1j * radius * e * dtheta
    weights = w / (2j * np.pi)
    return PoleSet(poles=poles, weights=weights, constant=0.0)
