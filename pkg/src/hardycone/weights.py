"""Piecewise-power weights and piecewise-constant variable exponents.

Weights are finite unions of power pieces ``c * x^beta`` with disjoint
interiors, either on the half-line or radial in R^n (in which case every
integral below carries the surface measure and the rho^(n-1) factor).
Divergent integrals are a first-class result, DIVERGENT, not an error:
the weight-condition checkers legitimately compare possibly-divergent
integrals.

Exponent functions are piecewise constant.  That keeps every essential
supremum / infimum exact, which is all the oscillation machinery needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

__all__ = [
    "DIVERGENT",
    "is_divergent",
    "IntegralValue",
    "WeightPiece",
    "Weight",
    "ExponentFunction",
    "OscillationProfile",
    "unit_sphere_area",
    "ball_volume",
    "weight_integral",
    "power_piece_integral",
    "oscillation",
    "oscillation_limit",
    "oscillation_profile",
    "vanishing_oscillation_at_origin",
]


class _Divergent:
    """Sentinel for an integral with a non-integrable endpoint."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGENT"


DIVERGENT = _Divergent()

IntegralValue = Union[float, _Divergent]


def is_divergent(value) -> bool:
    return value is DIVERGENT


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int) -> float:
    return unit_sphere_area(n) / n


def power_piece_integral(coeff: float, exponent: float, lo: float, hi: float) -> IntegralValue:
    """Exact integral of coeff * x^exponent over (lo, hi); hi may be inf.

    Returns DIVERGENT when an endpoint makes the power non-integrable
    (exponent <= -1 at lo = 0, exponent >= -1 at hi = inf).
    """
    if lo < 0.0 or hi < lo:
        raise ValueError("require 0 <= lo <= hi")
    if hi == lo:
        return 0.0
    e1 = exponent + 1.0
    if math.isinf(hi):
        if e1 >= 0.0:
            return DIVERGENT
        if lo == 0.0:
            return DIVERGENT
        return -coeff * lo**e1 / e1
    if lo == 0.0:
        if e1 <= 0.0:
            return DIVERGENT
        return coeff * hi**e1 / e1
    if e1 == 0.0:
        return coeff * math.log(hi / lo)
    return coeff * (hi**e1 - lo**e1) / e1


@dataclass(frozen=True)
class WeightPiece:
    lo: float
    hi: float  # may be inf
    coeff: float
    exponent: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError("piece interval must satisfy 0 <= lo < hi")
        if not (self.coeff > 0.0 and math.isfinite(self.coeff)):
            raise ValueError("piece coefficient must be positive and finite")
        if not math.isfinite(self.exponent):
            raise ValueError("piece exponent must be finite")


@dataclass(frozen=True)
class Weight:
    """Piecewise power weight; zero outside the listed pieces.

    ``dimension is None`` marks a half-line weight; an integer n marks a
    radial weight on R^n, in which case integrals are n-dimensional.
    """

    pieces: tuple[WeightPiece, ...]
    dimension: Optional[int] = None

    def __post_init__(self):
        pieces = tuple(
            p if isinstance(p, WeightPiece) else WeightPiece(*p) for p in self.pieces
        )
        pieces = tuple(sorted(pieces, key=lambda p: p.lo))
        if not pieces:
            raise ValueError("a weight needs at least one piece")
        for a, b in zip(pieces, pieces[1:]):
            if b.lo < a.hi:
                raise ValueError("weight pieces must have disjoint interiors")
        object.__setattr__(self, "pieces", pieces)
        if self.dimension is not None:
            if int(self.dimension) != self.dimension or self.dimension < 1:
                raise ValueError("dimension must be an integer >= 1")
            object.__setattr__(self, "dimension", int(self.dimension))

    @classmethod
    def power(
        cls,
        exponent: float,
        coeff: float = 1.0,
        support: tuple[float, float] = (0.0, math.inf),
        dimension: Optional[int] = None,
    ) -> "Weight":
        return cls((WeightPiece(support[0], support[1], coeff, exponent),), dimension)

    @property
    def is_radial(self) -> bool:
        return self.dimension is not None

    def value(self, x):
        xs = np.asarray(x, dtype=float)
        out = np.zeros_like(xs, dtype=float)
        for p in self.pieces:
            mask = (xs >= p.lo) & (xs < p.hi)
            out = np.where(mask, p.coeff * xs ** p.exponent, out)
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    __call__ = value

    def support_intervals(self) -> tuple[tuple[float, float], ...]:
        """Support as the closure of the union of piece intervals (merged)."""
        merged: list[list[float]] = []
        for p in self.pieces:
            if merged and p.lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], p.hi)
            else:
                merged.append([p.lo, p.hi])
        return tuple((a, b) for a, b in merged)

    @property
    def support_min(self) -> float:
        return self.pieces[0].lo

    @property
    def support_sup(self) -> float:
        return max(p.hi for p in self.pieces)

    def breakpoints(self) -> tuple[float, ...]:
        pts = set()
        for p in self.pieces:
            pts.add(p.lo)
            if math.isfinite(p.hi):
                pts.add(p.hi)
        return tuple(sorted(pts))

    def tilt(self, shift: float) -> "Weight":
        """The weight x^shift * w(x) with the same support and domain tag."""
        return Weight(
            tuple(WeightPiece(p.lo, p.hi, p.coeff, p.exponent + shift) for p in self.pieces),
            self.dimension,
        )

    def scale(self, factor: float) -> "Weight":
        return Weight(
            tuple(WeightPiece(p.lo, p.hi, factor * p.coeff, p.exponent) for p in self.pieces),
            self.dimension,
        )

    def as_half_line(self) -> "Weight":
        return Weight(self.pieces, None)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "pieces": [
                {"interval": [p.lo, p.hi], "coefficient": p.coeff, "exponent": p.exponent}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_dict(cls, record: dict) -> "Weight":
        pieces = tuple(
            WeightPiece(q["interval"][0], q["interval"][1], q["coefficient"], q["exponent"])
            for q in record["pieces"]
        )
        return cls(pieces, record.get("dimension"))


def weight_integral(w: Weight, a: float, b: float) -> IntegralValue:
    """Integral of the weight over radii [a, b] in its natural measure.

    Half-line weights integrate against dx.  Radial weights integrate
    against the n-dimensional measure, i.e. the result carries the factor
    sigma_{n-1} * rho^(n-1).  Closed form piece by piece; DIVERGENT as soon
    as one overlapped piece has a non-integrable endpoint.
    """
    if a < 0.0 or b < a:
        raise ValueError("require 0 <= a <= b")
    shift = 0.0
    factor = 1.0
    if w.is_radial:
        n = w.dimension
        shift = n - 1.0
        factor = unit_sphere_area(n)
    total = 0.0
    for p in w.pieces:
        lo = max(a, p.lo)
        hi = min(b, p.hi)
        if hi <= lo:
            continue
        part = power_piece_integral(p.coeff, p.exponent + shift, lo, hi)
        if is_divergent(part):
            return DIVERGENT
        total += part
    return factor * total


@dataclass(frozen=True)
class ExponentFunction:
    """Piecewise-constant exponent p(.) on (0, inf).

    ``values[i]`` is taken on ``[breaks[i-1], breaks[i])`` with the
    conventions breaks[-1] = 0 and breaks[len] = inf; breaks are the
    interior breakpoints only.
    """

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("need exactly one more value than interior breakpoints")
        bs = np.asarray(self.breaks)
        if len(bs) and (bs[0] <= 0.0 or np.any(np.diff(bs) <= 0.0) or not np.all(np.isfinite(bs))):
            raise ValueError("breakpoints must be finite, positive, strictly increasing")
        if min(self.values) <= 0.0 or not all(math.isfinite(v) for v in self.values):
            raise ValueError("exponent values must satisfy 0 < p- <= p+ < inf")

    @classmethod
    def constant(cls, p: float) -> "ExponentFunction":
        return cls((), (p,))

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[float, float, float]]) -> "ExponentFunction":
        """Build from (lo, hi, value) triples partitioning (0, inf)."""
        ivs = sorted(intervals, key=lambda t: t[0])
        if not ivs or ivs[0][0] != 0.0 or not math.isinf(ivs[-1][1]):
            raise ValueError("intervals must start at 0 and end at inf")
        breaks, values = [], []
        cursor = 0.0
        for lo, hi, val in ivs:
            if lo != cursor:
                raise ValueError("intervals must partition (0, inf) without gaps")
            values.append(val)
            if math.isfinite(hi):
                breaks.append(hi)
            cursor = hi
        return cls(tuple(breaks), tuple(values))

    @property
    def p_minus(self) -> float:
        return min(self.values)

    @property
    def p_plus(self) -> float:
        return max(self.values)

    @property
    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def value(self, x):
        xs = np.asarray(x, dtype=float)
        if np.any(xs <= 0.0):
            raise ValueError("exponent evaluated at positive points only")
        idx = np.searchsorted(np.asarray(self.breaks), xs, side="right")
        out = np.asarray(self.values)[idx]
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    __call__ = value

    def intervals(self) -> tuple[tuple[float, float, float], ...]:
        edges = (0.0,) + self.breaks + (math.inf,)
        return tuple((edges[i], edges[i + 1], self.values[i]) for i in range(len(self.values)))

    def to_dict(self) -> dict:
        return {"pieces": [{"interval": [lo, hi], "value": v} for lo, hi, v in self.intervals()]}

    @classmethod
    def from_dict(cls, record: dict) -> "ExponentFunction":
        return cls.from_intervals(
            (q["interval"][0], q["interval"][1], q["value"]) for q in record["pieces"]
        )


def _essential_pieces(p: ExponentFunction, w: Weight, radius: Optional[float] = None):
    """Positive-length overlaps of exponent pieces with supp w below radius.

    Yields (lo, hi, value) ordered by lo.  The closure taken in "supp w"
    adds only null sets, so positive-length interval overlap is exact.
    """
    out = []
    for plo, phi, val in p.intervals():
        for piece in w.pieces:
            lo = max(plo, piece.lo)
            hi = min(phi, piece.hi)
            if radius is not None:
                hi = min(hi, radius)
            if hi > lo:
                out.append((lo, hi, val))
    out.sort(key=lambda t: t[0])
    return out


def oscillation(p: ExponentFunction, w: Weight, delta: float) -> Optional[float]:
    """Essential oscillation of p over supp w within distance delta of 0.

    Ball geometry for radial weights and interval geometry on the half-line
    coincide on radii, so both reduce to (0, delta) intersected with the
    support.  Returns None when that set is null (undefined, distinct
    from an oscillation of 0).
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    pieces = _essential_pieces(p, w, radius=delta)
    if not pieces:
        return None
    vals = [v for _, _, v in pieces]
    return max(vals) - min(vals)


def oscillation_limit(p: ExponentFunction, w: Weight) -> float:
    """Oscillation of p over all of supp w: p+ - p- restricted to the support."""
    pieces = _essential_pieces(p, w)
    if not pieces:
        raise ValueError("weight support is empty")
    vals = [v for _, _, v in pieces]
    return max(vals) - min(vals)


def exponent_range_on_support(p: ExponentFunction, w: Weight) -> tuple[float, float]:
    pieces = _essential_pieces(p, w)
    if not pieces:
        raise ValueError("weight support is empty")
    vals = [v for _, _, v in pieces]
    return min(vals), max(vals)


def vanishing_oscillation_at_origin(p: ExponentFunction, w: Weight) -> bool:
    """Exact decision of "the oscillation vanishes as delta -> 0+".

    For piecewise-constant exponents this holds iff p is constant on the
    leading edge of supp w, i.e. on supp w intersected with some (0, delta).
    """
    start = w.support_min
    candidates = [b for b in p.breaks if b > start]
    candidates += [e for e in w.breakpoints() if e > start]
    candidates += [piece.hi for piece in w.pieces if math.isfinite(piece.hi) and piece.hi > start]
    upper = min(candidates) if candidates else start + 1.0
    probe = 0.5 * (start + upper) if math.isfinite(upper) else start + 1.0
    osc = oscillation(p, w, probe)
    return osc is not None and osc == 0.0


@dataclass(frozen=True)
class OscillationProfile:
    """Sampled local oscillation together with its large-radius value."""

    deltas: tuple[float, ...]
    values: tuple[Optional[float], ...]
    terminal: float

    def __post_init__(self):
        defined = [v for v in self.values if v is not None]
        if any(b < a - 1e-15 for a, b in zip(defined, defined[1:])):
            raise ValueError("oscillation samples must be non-decreasing")


def oscillation_profile(p: ExponentFunction, w: Weight, deltas) -> OscillationProfile:
    ds = tuple(float(d) for d in deltas)
    if any(d <= 0 for d in ds) or any(b <= a for a, b in zip(ds, ds[1:])):
        raise ValueError("deltas must be positive and increasing")
    vals = tuple(oscillation(p, w, d) for d in ds)
    return OscillationProfile(ds, vals, oscillation_limit(p, w))
