"""Piecewise-linear functions of one variable with exact integration.

Used for time-varying inflow rates and trip-distance parameters.  Two
extension modes are supported outside the node range: ``"zero"`` (the
function vanishes, appropriate for pulse-like inflow rates) and
``"clamp"`` (the end values extend as constants, appropriate for
slowly-varying parameters).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DataError


class PiecewiseLinear:
    """Piecewise-linear interpolant through ``(x, y)`` nodes.

    ``x`` must be strictly increasing and all values finite.  Calling the
    object evaluates it; scalars in, scalar out; arrays in, array out.
    """

    def __init__(self, x, y, extend: str = "clamp"):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size == 0:
            raise DataError("nodes must be two equal-length 1-d sequences")
        if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
            raise DataError("piecewise-linear nodes must be finite")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise DataError("node abscissae must be strictly increasing")
        if extend not in ("clamp", "zero"):
            raise DataError(f"unknown extension mode {extend!r}")
        self.x = x
        self.y = y
        self.extend = extend
        # cumulative trapezoid areas between consecutive nodes
        if x.size > 1:
            seg = 0.5 * (y[1:] + y[:-1]) * np.diff(x)
            self._cum = np.concatenate([[0.0], np.cumsum(seg)])
        else:
            self._cum = np.zeros(1)

    def __call__(self, t):
        scalar = np.isscalar(t) or np.ndim(t) == 0
        tt = np.asarray(t, dtype=float)
        out = np.interp(tt, self.x, self.y)
        if self.extend == "zero":
            out = np.where((tt < self.x[0]) | (tt > self.x[-1]), 0.0, out)
        return float(out) if scalar else out

    def integral(self, t: float) -> float:
        """Exact integral of the extended function over ``[0, t]``, ``t >= 0``."""
        t = float(t)
        if t <= 0.0:
            return 0.0
        x, y = self.x, self.y
        total = 0.0
        # stretch before the first node
        if x[0] > 0.0:
            left = min(t, x[0])
            if self.extend == "clamp":
                total += y[0] * left
            if t <= x[0]:
                return total
        lo = max(0.0, x[0])
        hi = min(t, x[-1])
        if hi > lo:
            total += self._segment_area(lo, hi)
        if t > x[-1] and self.extend == "clamp":
            total += y[-1] * (t - x[-1])
        return total

    def _segment_area(self, a: float, b: float) -> float:
        # exact area over [a, b] with [a, b] inside the node span
        ia = int(np.searchsorted(self.x, a, side="right")) - 1
        ib = int(np.searchsorted(self.x, b, side="right")) - 1
        ia = max(0, min(ia, self.x.size - 2))
        ib = max(0, min(ib, self.x.size - 2))
        if ia == ib:
            return 0.5 * (self(a) + self(b)) * (b - a)
        area = 0.5 * (self(a) + self.y[ia + 1]) * (self.x[ia + 1] - a)
        area += self._cum[ib] - self._cum[ia + 1]
        area += 0.5 * (self.y[ib] + self(b)) * (b - self.x[ib])
        return area

    def slopes(self):
        """Per-segment slopes as ``(x_lo, x_hi, dy/dx)`` triples."""
        if self.x.size < 2:
            return []
        d = np.diff(self.y) / np.diff(self.x)
        return [(float(self.x[i]), float(self.x[i + 1]), float(d[i]))
                for i in range(self.x.size - 1)]

    def minimum(self) -> float:
        return float(self.y.min())


def as_profile(value, extend: str = "clamp") -> PiecewiseLinear:
    """Coerce a constant or an existing profile into a :class:`PiecewiseLinear`."""
    if isinstance(value, PiecewiseLinear):
        return value
    v = float(value)
    if not math.isfinite(v):
        raise DataError("profile value must be finite")
    return PiecewiseLinear([0.0], [v], extend=extend)
