"""Cone elements: non-negative decreasing step functions on (0, inf).

A decreasing step function is the basic test object everywhere in this
package: it is non-negative, non-increasing, compactly supported, and all
the averaging operators applied to it have piecewise closed forms.  The
radial variant tags a step profile with a dimension and is read as
``g(x) = profile(|x|)`` on R^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "DecreasingStep",
    "RadialDecreasingStep",
    "random_decreasing",
    "random_radial",
    "power_approximant",
    "power_step",
]


@dataclass(frozen=True)
class DecreasingStep:
    """Step function with value ``heights[i]`` on ``[knots[i-1], knots[i])``.

    The implicit leading knot is 0 and the function vanishes on
    ``[knots[-1], inf)``, so the support is contained in ``[0, knots[-1]]``.
    Heights must be non-increasing and non-negative; knots strictly
    increasing and positive.
    """

    knots: tuple[float, ...]
    heights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple(float(t) for t in self.knots))
        object.__setattr__(self, "heights", tuple(float(a) for a in self.heights))
        if len(self.knots) == 0:
            raise ValueError("at least one piece is required")
        if len(self.knots) != len(self.heights):
            raise ValueError("knots and heights must have equal length")
        k = np.asarray(self.knots)
        h = np.asarray(self.heights)
        if not np.all(np.isfinite(k)) or k[0] <= 0.0 or np.any(np.diff(k) <= 0.0):
            raise ValueError("knots must be finite, positive and strictly increasing")
        if np.any(h < 0.0) or np.any(np.diff(h) > 0.0):
            raise ValueError("heights must be non-negative and non-increasing")

    @cached_property
    def _knots_arr(self) -> np.ndarray:
        return np.asarray(self.knots, dtype=float)

    @cached_property
    def _heights_arr(self) -> np.ndarray:
        return np.asarray(self.heights, dtype=float)

    @cached_property
    def _grid(self) -> np.ndarray:
        """Full breakpoint grid including the implicit leading 0."""
        return np.concatenate(([0.0], self._knots_arr))

    @cached_property
    def _cummass(self) -> np.ndarray:
        """Cumulative integral of the function at each grid point."""
        pieces = self._heights_arr * np.diff(self._grid)
        return np.concatenate(([0.0], np.cumsum(pieces)))

    @property
    def piece_count(self) -> int:
        return len(self.knots)

    @property
    def support_max(self) -> float:
        return self.knots[-1]

    @property
    def mass(self) -> float:
        """Total integral over (0, inf)."""
        return float(self._cummass[-1])

    def value(self, x):
        """Evaluate at x > 0 (scalar or array)."""
        xs = np.asarray(x, dtype=float)
        if np.any(xs <= 0.0):
            raise ValueError("evaluation points must be positive")
        idx = np.searchsorted(self._knots_arr, xs, side="right")
        padded = np.concatenate((self._heights_arr, [0.0]))
        out = padded[idx]
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    __call__ = value

    def cumulative(self, x):
        """Integral over (0, min(x, support)); vectorized, exact."""
        xs = np.asarray(x, dtype=float)
        xs_c = np.clip(xs, 0.0, self.support_max)
        idx = np.searchsorted(self._grid, xs_c, side="right") - 1
        idx = np.clip(idx, 0, len(self.knots))
        padded = np.concatenate((self._heights_arr, [0.0]))
        out = self._cummass[idx] + padded[idx] * (xs_c - self._grid[idx])
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def integrate(self, a: float, b: float) -> float:
        """Exact integral over [a, b], 0 <= a <= b (b may be inf)."""
        if a < 0.0 or b < a:
            raise ValueError("require 0 <= a <= b")
        return float(self.cumulative(min(b, self.support_max)) - self.cumulative(a))

    def scale_heights(self, factor: float) -> "DecreasingStep":
        if factor <= 0.0:
            raise ValueError("factor must be positive")
        return DecreasingStep(self.knots, tuple(factor * a for a in self.heights))

    def to_dict(self) -> dict:
        return {"knots": list(self.knots), "heights": list(self.heights)}

    @classmethod
    def from_dict(cls, record: dict) -> "DecreasingStep":
        return cls(tuple(record["knots"]), tuple(record["heights"]))

    @classmethod
    def indicator(cls, upper: float, height: float = 1.0) -> "DecreasingStep":
        """The multiple ``height * chi_(0, upper)``."""
        return cls((upper,), (height,))


@dataclass(frozen=True)
class RadialDecreasingStep:
    """Radially decreasing function on R^n given by a step profile in |x|."""

    dimension: int
    profile: DecreasingStep

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError("dimension must be an integer >= 1")
        object.__setattr__(self, "dimension", int(self.dimension))

    @property
    def support_max(self) -> float:
        return self.profile.support_max

    def value_radial(self, rho):
        return self.profile.value(rho)

    def value_point(self, x: Sequence[float]):
        """Evaluate at a point of R^n (depends on |x| only)."""
        pt = np.asarray(x, dtype=float)
        if pt.shape != (self.dimension,):
            raise ValueError(f"expected a point of R^{self.dimension}")
        return self.profile.value(float(np.linalg.norm(pt)))

    def radial_moment_cumulative(self, r):
        """Exact integral of rho^(n-1) * profile(rho) over (0, min(r, support))."""
        n = self.dimension
        rs = np.asarray(r, dtype=float)
        grid = self.profile._grid
        heights = self.profile._heights_arr
        pieces = heights * np.diff(grid**n) / n
        cum = np.concatenate(([0.0], np.cumsum(pieces)))
        rs_c = np.clip(rs, 0.0, self.support_max)
        idx = np.searchsorted(grid, rs_c, side="right") - 1
        idx = np.clip(idx, 0, len(grid) - 1)
        padded = np.concatenate((heights, [0.0]))
        out = cum[idx] + padded[idx] * (rs_c**n - grid[idx] ** n) / n
        return float(out) if np.isscalar(r) or rs.ndim == 0 else out

    def to_dict(self) -> dict:
        rec = self.profile.to_dict()
        rec["dimension"] = self.dimension
        return rec

    @classmethod
    def from_dict(cls, record: dict) -> "RadialDecreasingStep":
        return cls(int(record["dimension"]), DecreasingStep.from_dict(record))

    @classmethod
    def ball_indicator(cls, dimension: int, radius: float, height: float = 1.0):
        return cls(dimension, DecreasingStep.indicator(radius, height))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_decreasing(
    seed,
    pieces: int,
    knot_range: tuple[float, float] = (1e-2, 1e2),
    height_range: tuple[float, float] = (1e-3, 1e3),
) -> DecreasingStep:
    """Draw a random decreasing step, deterministic in the seed.

    Knots and heights are log-uniform in their ranges; heights are sorted
    downward so the cone invariant holds by construction.
    """
    if pieces < 1:
        raise ValueError("pieces must be >= 1")
    for lo, hi in (knot_range, height_range):
        if not (0.0 < lo < hi):
            raise ValueError("ranges must satisfy 0 < lo < hi")
    rng = _as_rng(seed)
    knots = np.sort(np.exp(rng.uniform(np.log(knot_range[0]), np.log(knot_range[1]), pieces)))
    # continuous draws collide with probability zero, but keep the invariant airtight
    for i in range(1, pieces):
        if knots[i] <= knots[i - 1]:
            knots[i] = np.nextafter(knots[i - 1], np.inf)
    heights = np.sort(np.exp(rng.uniform(np.log(height_range[0]), np.log(height_range[1]), pieces)))[::-1]
    return DecreasingStep(tuple(knots), tuple(heights))


def random_radial(
    seed,
    dimension: int,
    pieces: int,
    knot_range: tuple[float, float] = (1e-2, 1e2),
    height_range: tuple[float, float] = (1e-3, 1e3),
) -> RadialDecreasingStep:
    return RadialDecreasingStep(dimension, random_decreasing(seed, pieces, knot_range, height_range))


def power_step(lam: float, pieces: int, lo: float, hi: float) -> DecreasingStep:
    """Step minorant of x^(-lam) on a geometric grid from lo to hi.

    Heights are the right-endpoint values, so the step lies below x^(-lam)
    on every cell and is capped at lo^(-lam) on (0, lo).  Used both by
    :func:`power_approximant` and by the search seed families, which need
    lam outside (0, 1).
    """
    if pieces < 1:
        raise ValueError("pieces must be >= 1")
    if not (0.0 < lo < hi):
        raise ValueError("require 0 < lo < hi")
    if pieces == 1:
        knots = np.asarray([hi])
    else:
        knots = np.geomspace(lo, hi, pieces)
    heights = knots ** (-lam)
    if lam < 0.0:
        heights = heights[::-1].copy()  # increasing power: flip to keep the cone invariant
    return DecreasingStep(tuple(knots), tuple(heights))


def power_approximant(lam: float, pieces: int, grid_min: float = 1e-6) -> DecreasingStep:
    """Decreasing step approximation of x^(-lam) on (0, 1].

    The grid is geometric: near-extremizers of Hardy-type inequalities
    concentrate at the origin, so resolution is spent there.  On each cell
    with positive left endpoint the sup-norm gap to x^(-lam) is the
    difference of the endpoint values of x^(-lam); on (0, grid_min) the
    approximant is capped at grid_min^(-lam).
    """
    if not (0.0 < lam < 1.0):
        raise ValueError("lam must lie in (0, 1)")
    if not (0.0 < grid_min < 1.0):
        raise ValueError("grid_min must lie in (0, 1)")
    return power_step(lam, pieces, grid_min, 1.0)
