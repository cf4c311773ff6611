from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class WindowError(ValueError):
    """Raised for a spectral window that violates the gap ordering."""


@dataclass(frozen=True)
class SpectralWindow:
    """Target interval (a, b) with eigengaps (a_minus, a_plus) and (b_minus, b_plus).

    Only ``a_minus`` may be -inf and only ``b_plus`` may be +inf.
    """

    a: float
    b: float
    a_minus: float
    a_plus: float
    b_minus: float
    b_plus: float

    def __post_init__(self):
        am, ap, bm, bp = self.a_minus, self.a_plus, self.b_minus, self.b_plus
        for name in ("a", "b", "a_plus", "b_minus"):
            if not math.isfinite(getattr(self, name)):
                raise WindowError(f"{name} must be finite")
        if math.isnan(am) or am == math.inf or math.isnan(bp) or bp == -math.inf:
            raise WindowError("a_minus may only be -inf and b_plus only +inf")
        if not (am < self.a < ap <= bm < self.b < bp):
            raise WindowError(
                "window must satisfy a_minus < a < a_plus <= b_minus < b < b_plus, "
                f"got ({am}, {self.a}, {ap}, {bm}, {self.b}, {bp})"
            )

    @classmethod
    def from_gaps(cls, a_minus, a_plus, b_minus, b_plus, a=None, b=None) -> "SpectralWindow":
        """Build a window from the four gap endpoints; a, b default to gap midpoints."""
        a_minus, a_plus, b_minus, b_plus = map(float, (a_minus, a_plus, b_minus, b_plus))
        if a is None:
            if math.isfinite(a_minus):
                a = 0.5 * (a_minus + a_plus)
            else:
                a = a_plus - 0.5 * _finite_width(b_plus - b_minus, b_minus - a_plus)
        if b is None:
            if math.isfinite(b_plus):
                b = 0.5 * (b_minus + b_plus)
            else:
                b = b_minus + 0.5 * _finite_width(a_plus - a_minus, b_minus - a_plus)
        return cls(float(a), float(b), a_minus, a_plus, b_minus, b_plus)

    @property
    def gaps(self) -> tuple[float, float, float, float]:
        return (self.a_minus, self.a_plus, self.b_minus, self.b_plus)

    @property
    def span(self) -> float:
        """Width of the finite part of the window, used to clip sampling ranges."""
        lo = self.a_minus if math.isfinite(self.a_minus) else self.a_plus
        hi = self.b_plus if math.isfinite(self.b_plus) else self.b_minus
        return max(hi - lo, self.b - self.a)

    def indicator(self, x):
        """Rectangular function S_ab: 1 on (a, b), 0 elsewhere."""
        x = np.asarray(x, dtype=float)
        return ((x > self.a) & (x < self.b)).astype(float)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "a_minus": _json_float(self.a_minus),
            "a_plus": self.a_plus,
            "b_minus": self.b_minus,
            "b_plus": _json_float(self.b_plus),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralWindow":
        return cls(*(float(d[k]) for k in ("a", "b", "a_minus", "a_plus", "b_minus", "b_plus")))


def _finite_width(*widths: float) -> float:
    for w in widths:
        if math.isfinite(w) and w > 0:
            return w
    return 1.0


def _json_float(x: float):
    # JSON has no infinity literal; "inf"/"-inf" strings round-trip through float()
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")
