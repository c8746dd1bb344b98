"""Weight-condition checkers on the decreasing cone.

Four conditions are decided by sup-ratio sweeps, all in closed form for
piecewise-power weights:

* ``check_br``               int_s^inf (s/x)^r v dx <= C int_0^s v dx
* ``check_br_radial``        the same with the |x|^(r(1-n)) tilt in R^n
* ``check_br_variable``      int_r^inf (r/(sx))^p(x) v dx <= C int_0^r v/s^p(x) dx
* ``check_br_variable_radial``   the R^n analogue with the |x|^n scaling

A finite sweep cannot certify a supremum, so "holds" additionally demands
no monotone growth trend in the trailing decade at either grid end (slope
threshold 0.05 on log-log samples).  A divergent right-hand side makes the
inequality hold with no content; such parameters are skipped and the
verdict becomes "vacuous" only when every swept parameter is trivial.

``find_violation`` turns a non-constant exponent on the support into an
explicit witness by locating the first essential jump and driving the
scale parameter to 0 or infinity, mirroring how the sup-ratio actually
blows up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .weights import (
    DIVERGENT,
    ExponentFunction,
    IntegralValue,
    Weight,
    _essential_pieces,
    is_divergent,
    weight_integral,
)

__all__ = [
    "ConditionReport",
    "SweepRow",
    "default_sweep",
    "br_sides",
    "br_radial_sides",
    "variable_sides",
    "variable_radial_sides",
    "check_br",
    "check_br_radial",
    "check_br_variable",
    "check_br_variable_radial",
    "ViolationOutcome",
    "find_violation",
    "TREND_SLOPE_THRESHOLD",
]

TREND_SLOPE_THRESHOLD = 0.05


def default_sweep(lo: float = 1e-6, hi: float = 1e6, per_decade: int = 4) -> np.ndarray:
    """Geometric sweep grid; the default factor is 10^(1/4)."""
    count = int(round(math.log10(hi / lo) * per_decade)) + 1
    return np.geomspace(lo, hi, count)


@dataclass(frozen=True)
class SweepRow:
    r: Optional[float]
    s: float
    lhs: IntegralValue
    rhs: IntegralValue
    ratio: Optional[float]  # None marks a trivially-satisfied (divergent-RHS) row


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    holds: Union[bool, str]  # True | False | "vacuous"
    constant: Optional[float]  # sup of lhs/rhs over the sweep (inf on divergence)
    witness: Optional[dict]
    sweep: dict
    rows: tuple[SweepRow, ...] = field(repr=False, default=())
    analytic_constant: Optional[float] = None

    @property
    def failed(self) -> bool:
        return self.holds is False


# ----------------------------------------------------------------------------
# single-point evaluators (closed form piece by piece)


def br_sides(v: Weight, r: float, s: float) -> tuple[IntegralValue, IntegralValue]:
    lhs_core = weight_integral(v.tilt(-r), s, math.inf)
    lhs = DIVERGENT if is_divergent(lhs_core) else s**r * lhs_core
    rhs = weight_integral(v, 0.0, s)
    return lhs, rhs


def br_radial_sides(u: Weight, r: float, s: float) -> tuple[IntegralValue, IntegralValue]:
    n = u.dimension
    lhs_core = weight_integral(u.tilt(-r * n), s, math.inf)
    lhs = DIVERGENT if is_divergent(lhs_core) else s**r * lhs_core
    rhs = weight_integral(u.tilt(r * (1.0 - n)), 0.0, s)
    return lhs, rhs


def variable_sides(v: Weight, p: ExponentFunction, r: float, s: float):
    """Sides of the half-line variable-exponent condition at (r, s)."""
    lhs: IntegralValue = 0.0
    rhs: IntegralValue = 0.0
    for lo, hi, pj in p.intervals():
        if hi > r:
            tail = weight_integral(v.tilt(-pj), max(lo, r), hi)
            if is_divergent(tail):
                lhs = DIVERGENT
            elif not is_divergent(lhs):
                lhs += (r / s) ** pj * tail
        head_hi = min(hi, r)
        if head_hi > lo:
            head = weight_integral(v, lo, head_hi)
            if is_divergent(head):
                rhs = DIVERGENT
            elif not is_divergent(rhs):
                rhs += s ** (-pj) * head
    return lhs, rhs


def variable_radial_sides(u: Weight, p: ExponentFunction, r: float, s: float):
    """Sides of the radial variable-exponent condition at (r, s).

    The left side integrates (r / (s |x|^n))^p(x) u, the right side
    |x|^((1-n) p(x)) u / s^p(x) over the ball of radius r.
    """
    n = u.dimension
    lhs: IntegralValue = 0.0
    rhs: IntegralValue = 0.0
    for lo, hi, pj in p.intervals():
        if hi > r:
            tail = weight_integral(u.tilt(-n * pj), max(lo, r), hi)
            if is_divergent(tail):
                lhs = DIVERGENT
            elif not is_divergent(lhs):
                lhs += (r / s) ** pj * tail
        head_hi = min(hi, r)
        if head_hi > lo:
            head = weight_integral(u.tilt((1.0 - n) * pj), lo, head_hi)
            if is_divergent(head):
                rhs = DIVERGENT
            elif not is_divergent(rhs):
                rhs += s ** (-pj) * head
    return lhs, rhs


# ----------------------------------------------------------------------------
# sweep aggregation


def _classify_rows(rows: Sequence[SweepRow]):
    finite: list[SweepRow] = []
    infinite: list[SweepRow] = []
    trivial = 0
    for row in rows:
        if row.ratio is None:
            trivial += 1
        elif math.isinf(row.ratio):
            infinite.append(row)
        else:
            finite.append(row)
    return finite, infinite, trivial


def _trend_unbounded(ss: np.ndarray, ratios: np.ndarray) -> Optional[str]:
    """Detect monotone growth in the trailing decade at either grid end."""
    mask = ratios > 0.0
    ss, ratios = ss[mask], ratios[mask]
    if len(ss) < 3:
        return None
    logs, logr = np.log10(ss), np.log10(ratios)
    for side in ("low", "high"):
        if side == "low":
            sel = logs <= logs[0] + 1.0
        else:
            sel = logs >= logs[-1] - 1.0
        if np.count_nonzero(sel) < 2 or np.ptp(logs[sel]) < 1e-9:
            continue
        slope = np.polyfit(logs[sel], logr[sel], 1)[0]
        if side == "low" and slope < -TREND_SLOPE_THRESHOLD:
            return "growth as s -> 0"
        if side == "high" and slope > TREND_SLOPE_THRESHOLD:
            return "growth as s -> inf"
    return None


def _ratio_of(lhs: IntegralValue, rhs: IntegralValue) -> Optional[float]:
    if is_divergent(rhs):
        return None  # trivially satisfied at this parameter
    if is_divergent(lhs):
        return math.inf
    if rhs == 0.0:
        return math.inf if lhs > 0.0 else None
    return lhs / rhs


def _aggregate(condition: str, rows: list[SweepRow], sweep_desc: dict,
               analytic: Optional[float] = None) -> ConditionReport:
    finite, infinite, trivial = _classify_rows(rows)
    if infinite:
        w = infinite[0]
        witness = {"s": w.s, "ratio": math.inf}
        if w.r is not None:
            witness["r"] = w.r
        return ConditionReport(condition, False, math.inf, witness, sweep_desc,
                               tuple(rows), analytic)
    if not finite:
        return ConditionReport(condition, "vacuous", None, None, sweep_desc,
                               tuple(rows), analytic)
    best = max(finite, key=lambda row: row.ratio)
    witness = {"s": best.s, "ratio": best.ratio}
    if best.r is not None:
        witness["r"] = best.r

    # marginal profile over s (max across r where the sweep is two-parameter)
    by_s: dict[float, float] = {}
    for row in finite:
        by_s[row.s] = max(by_s.get(row.s, 0.0), row.ratio)
    ss = np.array(sorted(by_s))
    profile = np.array([by_s[s] for s in ss])
    trend = _trend_unbounded(ss, profile)
    if trend is None and rows and rows[0].r is not None:
        by_r: dict[float, float] = {}
        for row in finite:
            by_r[row.r] = max(by_r.get(row.r, 0.0), row.ratio)
        rr = np.array(sorted(by_r))
        trend = _trend_unbounded(rr, np.array([by_r[r] for r in rr]))
        if trend is not None:
            trend = trend.replace("s ->", "r ->")
    if trend is not None:
        return ConditionReport(condition, False, best.ratio, {**witness, "trend": trend},
                               sweep_desc, tuple(rows), analytic)
    return ConditionReport(condition, True, best.ratio, witness, sweep_desc, tuple(rows), analytic)


def _pure_power(w: Weight) -> Optional[tuple[float, float]]:
    """(coeff, exponent) when the weight is a single piece spanning (0, inf)."""
    if len(w.pieces) == 1:
        p = w.pieces[0]
        if p.lo == 0.0 and math.isinf(p.hi):
            return p.coeff, p.exponent
    return None


def check_br(v: Weight, r: float, s_grid: Optional[np.ndarray] = None) -> ConditionReport:
    """Decide the averaging-weight condition of order r on the half-line.

    For a pure power v = c x^beta the sup-ratio has the closed form
    (beta+1)/(r-beta-1) on -1 < beta < r-1, recorded as the analytic
    constant next to the swept estimate.
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    if v.is_radial:
        raise ValueError("check_br expects a half-line weight")
    grid = default_sweep() if s_grid is None else np.asarray(s_grid, dtype=float)
    rows = []
    for s in grid:
        lhs, rhs = br_sides(v, r, float(s))
        rows.append(SweepRow(None, float(s), lhs, rhs, _ratio_of(lhs, rhs)))
    analytic = None
    power = _pure_power(v)
    if power is not None:
        beta = power[1]
        if -1.0 < beta < r - 1.0:
            analytic = (beta + 1.0) / (r - beta - 1.0)
    desc = {"s_min": float(grid[0]), "s_max": float(grid[-1]), "points": len(grid)}
    return _aggregate("Br", rows, desc, analytic)


def check_br_radial(u: Weight, r: float, s_grid: Optional[np.ndarray] = None) -> ConditionReport:
    """Radial analogue of :func:`check_br`; the surface factor cancels in the ratio."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    if not u.is_radial:
        raise ValueError("check_br_radial expects a radial weight")
    grid = default_sweep() if s_grid is None else np.asarray(s_grid, dtype=float)
    rows = []
    for s in grid:
        lhs, rhs = br_radial_sides(u, r, float(s))
        rows.append(SweepRow(None, float(s), lhs, rhs, _ratio_of(lhs, rhs)))
    analytic = None
    power = _pure_power(u)
    if power is not None:
        n = u.dimension
        beta_eff = power[1] + r * (1.0 - n) + n - 1.0  # exponent after the radial tilt
        if -1.0 < beta_eff < r - 1.0:
            analytic = (beta_eff + 1.0) / (r - beta_eff - 1.0)
    desc = {"s_min": float(grid[0]), "s_max": float(grid[-1]), "points": len(grid)}
    return _aggregate("Br-radial", rows, desc, analytic)


def _check_variable(condition: str, sides, w: Weight, p: ExponentFunction,
                    r_grid, s_grid) -> ConditionReport:
    rg = default_sweep() if r_grid is None else np.asarray(r_grid, dtype=float)
    sg = default_sweep() if s_grid is None else np.asarray(s_grid, dtype=float)
    rows = []
    for r in rg:
        for s in sg:
            lhs, rhs = sides(w, p, float(r), float(s))
            rows.append(SweepRow(float(r), float(s), lhs, rhs, _ratio_of(lhs, rhs)))
    desc = {
        "r_min": float(rg[0]), "r_max": float(rg[-1]), "r_points": len(rg),
        "s_min": float(sg[0]), "s_max": float(sg[-1]), "s_points": len(sg),
    }
    return _aggregate(condition, rows, desc)


def check_br_variable(v: Weight, p: ExponentFunction,
                      r_grid=None, s_grid=None) -> ConditionReport:
    """Two-parameter variable-exponent condition on the half-line.

    With a constant exponent the scale factor cancels identically and the
    verdict coincides with :func:`check_br` at r = p.
    """
    if v.is_radial:
        raise ValueError("check_br_variable expects a half-line weight")
    return _check_variable("cond-variable", variable_sides, v, p, r_grid, s_grid)


def check_br_variable_radial(u: Weight, p: ExponentFunction,
                             r_grid=None, s_grid=None) -> ConditionReport:
    if not u.is_radial:
        raise ValueError("check_br_variable_radial expects a radial weight")
    return _check_variable("cond-variable-radial", variable_radial_sides, u, p, r_grid, s_grid)


# ----------------------------------------------------------------------------
# constructive violation search


@dataclass(frozen=True)
class ViolationOutcome:
    """Result of driving the variable-exponent condition to a contradiction.

    status is one of "constant-exponent" (no violation exists on this
    support), "witness" (target ratio reached) or "range-exhausted".
    """

    status: str
    target: float
    case: Optional[str] = None  # "i": jump up past delta, "ii": jump down
    r: Optional[float] = None
    s: Optional[float] = None
    ratio: Optional[float] = None
    epsilon: Optional[float] = None
    samples: tuple[tuple[float, float], ...] = ()

    @property
    def found(self) -> bool:
        return self.status == "witness"


def find_violation(
    p: ExponentFunction,
    w: Weight,
    target: float,
    s_limits: tuple[float, float] = (1e-14, 1e14),
    per_decade: int = 4,
) -> ViolationOutcome:
    """Locate (r, s) making the variable-exponent condition ratio exceed target.

    When p is non-constant on supp w, the first essential jump fixes the
    ball radius r: an upward jump (case i) leaves the essential sup over
    (0, r) short of p+ by epsilon and the ratio grows like s^-epsilon as
    s decreases; a downward jump (case ii) grows like s^epsilon as s
    increases.  The reported ratio is the full condition ratio at the
    witness, re-evaluable independently.
    """
    if target <= 1.0:
        raise ValueError("target ratio must exceed 1")
    pieces = _essential_pieces(p, w)
    if not pieces:
        raise ValueError("weight support is empty")
    values = [val for _, _, val in pieces]
    p_sup, p_inf = max(values), min(values)
    if p_sup == p_inf:
        return ViolationOutcome("constant-exponent", target)

    sides = variable_radial_sides if w.is_radial else variable_sides
    first = values[0]
    if first < p_sup:
        case = "i"
        j = values.index(p_sup)
        delta = pieces[j][0]
        alpha = max(values[:j])
        eps = p_sup - alpha
    else:
        case = "ii"
        j = values.index(p_inf)
        delta = pieces[j][0]
        beta = min(values[:j])
        eps = beta - p_inf

    factor = 10.0 ** (1.0 / per_decade)
    if case == "i":
        s = min(1.0, delta)
        stop = lambda s: s < s_limits[0]
        step = lambda s: s / factor
    else:
        s = max(1.0, delta)
        stop = lambda s: s > s_limits[1]
        step = lambda s: s * factor

    samples: list[tuple[float, float]] = []
    while not stop(s):
        lhs, rhs = sides(w, p, delta, s)
        ratio = _ratio_of(lhs, rhs)
        if ratio is not None:
            samples.append((s, ratio))
            if ratio >= target:
                return ViolationOutcome("witness", target, case, delta, s, ratio,
                                        eps, tuple(samples))
        s = step(s)
    return ViolationOutcome("range-exhausted", target, case, delta, None, None,
                            eps, tuple(samples))


def violation_slope(outcome: ViolationOutcome, decades: float = 2.0) -> float:
    """Log-log slope of ratio against s over the trailing decades of the descent."""
    if len(outcome.samples) < 2:
        raise ValueError("not enough samples for a slope")
    ss = np.array([s for s, _ in outcome.samples])
    ratios = np.array([v for _, v in outcome.samples])
    finite = np.isfinite(ratios) & (ratios > 0.0)
    ss, ratios = ss[finite], ratios[finite]
    edge = ss[-1]
    if outcome.case == "i":
        sel = ss <= edge * 10.0**decades
    else:
        sel = ss >= edge / 10.0**decades
    return float(np.polyfit(np.log10(ss[sel]), np.log10(ratios[sel]), 1)[0])
