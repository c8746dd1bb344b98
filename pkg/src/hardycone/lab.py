"""Modular functionals, best-constant search and end-to-end equivalences.

The modular S(f) = int |f|^p(x) w(x) dx is the variable-exponent
substitute for a norm; the central quantity everywhere below is the
modular ratio S(Af)/S(f) of an averaging or fractional operator A over
the decreasing cone.  Its supremum is the best constant of the one-weight
inequality, estimated here by seeded random search plus coordinate ascent.

Denominators are exact (step function against piecewise powers).
Numerators are piecewise-smooth: each merged cell is integrated
adaptively, the leading cell and everything beyond the last breakpoint in
closed form.  When the numerator tail genuinely diverges the search can
still rank candidates by truncating that tail at a fixed horizon; such
values are flagged, and they are exactly the blow-up evidence the
consistency checks look for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .cone import DecreasingStep, RadialDecreasingStep, power_step, random_decreasing
from .conditions import (
    ConditionReport,
    check_br,
    check_br_radial,
    check_br_variable,
    check_br_variable_radial,
)
from .operators import (
    ball_average,
    hardy_average,
    riemann_liouville,
    sample_grid,
    sandwich_constants,
    truncated_potential,
    truncated_potential_batch,
)
from .quadrature import (
    QuadratureError,
    QuadratureSpec,
    cell_rows,
    integrate_adaptive,
    integrate_batched_cells,
    integrate_tail,
)
from .weights import (
    DIVERGENT,
    ExponentFunction,
    IntegralValue,
    Weight,
    _essential_pieces,
    is_divergent,
    power_piece_integral,
    unit_sphere_area,
    vanishing_oscillation_at_origin,
)

__all__ = [
    "OperatorSpec",
    "ModularValue",
    "SearchResult",
    "PolarPair",
    "EquivalenceReport",
    "ConsistencyReport",
    "DivergentDenominatorError",
    "ConeHypothesisError",
    "SandwichViolationError",
    "modular",
    "ratio_Q",
    "best_constant_search",
    "polar_reduce",
    "equivalence_check",
    "theorem_consistency",
    "LAB_SPEC",
]

LAB_SPEC = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-9, max_subdivisions=600)

ConeElement = Union[DecreasingStep, RadialDecreasingStep]


class DivergentDenominatorError(ValueError):
    pass


class ConeHypothesisError(RuntimeError):
    pass


class SandwichViolationError(AssertionError):
    pass


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator the modular ratio is taken over.

    kind "T" (half-line average), "H" (ball average), "R" (fractional
    average on the half-line, needs alpha in (0,1)), "I" (truncated
    potential, needs alpha in (0, n)).
    """

    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("T", "H", "R", "I"):
            raise ValueError("operator kind must be one of T, H, R, I")
        if self.kind in ("R", "I") and self.alpha is None:
            raise ValueError(f"operator {self.kind} needs a fractional order alpha")

    @property
    def radial(self) -> bool:
        return self.kind in ("H", "I")

    def label(self) -> str:
        return self.kind if self.alpha is None else f"{self.kind}[{self.alpha}]"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, rec) -> "OperatorSpec":
        if isinstance(rec, str):
            return cls(rec)
        return cls(rec["kind"], rec.get("alpha"))


def _check_geometry(element: ConeElement, op: OperatorSpec, w: Weight):
    if op.radial:
        if not isinstance(element, RadialDecreasingStep):
            raise ValueError(f"operator {op.kind} acts on radial elements")
        if w.dimension != element.dimension:
            raise ValueError("weight and cone element live in different dimensions")
        return element.dimension
    if not isinstance(element, DecreasingStep):
        raise ValueError(f"operator {op.kind} acts on half-line elements")
    if w.is_radial:
        raise ValueError("half-line operator against a radial weight")
    return None


def _measure(w: Weight) -> tuple[float, float]:
    """(coefficient factor, exponent shift) of the underlying 1-d measure."""
    if w.is_radial:
        return unit_sphere_area(w.dimension), float(w.dimension - 1)
    return 1.0, 0.0


def _merged_points(element: ConeElement, p: ExponentFunction, w: Weight, upper: float):
    prof = element.profile if isinstance(element, RadialDecreasingStep) else element
    pts = {0.0, upper}
    pts.update(k for k in prof.knots if k < upper)
    pts.update(b for b in p.breaks if b < upper)
    pts.update(e for e in w.breakpoints() if 0.0 < e < upper)
    return sorted(pts)


def _piece_at(w: Weight, x: float):
    for piece in w.pieces:
        if piece.lo <= x < piece.hi:
            return piece
    return None


@dataclass(frozen=True)
class ModularValue:
    """Value of the modular with its per-weight-piece breakdown."""

    value: IntegralValue
    breakdown: tuple[IntegralValue, ...]

    @property
    def finite(self) -> bool:
        return not is_divergent(self.value)


def modular(element: ConeElement, p: ExponentFunction, w: Weight) -> ModularValue:
    """S(f) = int f(x)^p(x) w(x) dmu(x), exact.

    Breakpoints of the step, the exponent and the weight are merged; on
    each cell the integrand is a constant times a power, so every cell is
    a closed form.  A weight piece that diverges inside the support of the
    element makes the whole modular DIVERGENT.
    """
    if isinstance(element, RadialDecreasingStep) or w.is_radial:
        if not (isinstance(element, RadialDecreasingStep) and w.dimension == element.dimension):
            raise ValueError("geometry of the element and the weight must agree")
        prof = element.profile
    else:
        prof = element
    factor, shift = _measure(w)
    per_piece: list[IntegralValue] = [0.0] * len(w.pieces)
    divergent = False
    pts = _merged_points(element, p, w, prof.support_max)
    for l, u in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (l + u) if l == 0.0 else math.sqrt(l * u)
        a = float(prof.value(mid))
        if a == 0.0:
            continue
        for idx, piece in enumerate(w.pieces):
            if not (piece.lo <= mid < piece.hi):
                continue
            pj = float(p.value(mid))
            cell = power_piece_integral(piece.coeff * factor, piece.exponent + shift, l, u)
            if is_divergent(cell):
                per_piece[idx] = DIVERGENT
                divergent = True
            elif not is_divergent(per_piece[idx]):
                per_piece[idx] += a**pj * cell
            break
    if divergent:
        return ModularValue(DIVERGENT, tuple(per_piece))
    return ModularValue(float(sum(per_piece)), tuple(per_piece))


def _image_data(element: ConeElement, op: OperatorSpec, n: Optional[int]):
    """(vectorized evaluator, homogeneity degree, mass coefficient, exact tail, tail bound factor)."""
    if op.kind == "T":
        return (lambda xs: hardy_average(element, xs)), 1.0, element.mass, True, 1.0
    if op.kind == "R":
        cst = sandwich_constants("R-vs-T", op.alpha)
        return (
            lambda xs: riemann_liouville(element, xs, op.alpha),
            1.0,
            element.mass,
            False,
            cst.upper,
        )
    sigma = unit_sphere_area(n)
    mass_n = sigma * element.radial_moment_cumulative(element.support_max)
    if op.kind == "H":
        return (lambda xs: ball_average(element, xs)), float(n), mass_n, True, 1.0
    cst = sandwich_constants("I-vs-H", op.alpha, n)
    return (
        lambda xs: truncated_potential_batch(element, xs, op.alpha),
        float(n),
        mass_n,
        False,
        cst.upper,
    )


def _decade_segments(lo: float, hi: float, pj: float, c: float, b: float,
                     smooth_first: bool = False, per_decade: int = 2) -> np.ndarray:
    """Geometric subdivision of [lo, hi] as rows for the batched integrator.

    ``smooth_first`` applies the edge substitution on the first slice, for
    images whose fractional kink sits at lo.
    """
    count = max(1, math.ceil(per_decade * math.log10(hi / lo)))
    edges = np.geomspace(lo, hi, count + 1)
    rows = cell_rows(edges[:-1], edges[1:], pj, c, b)
    if smooth_first:
        rows = np.vstack((cell_rows(edges[0], edges[1], pj, c, b, smooth_edge=True),
                          rows[1:]))
    return rows


def image_modular(
    element: ConeElement,
    op: OperatorSpec,
    p: ExponentFunction,
    w: Weight,
    tail_horizon: Optional[float] = None,
    spec: QuadratureSpec = LAB_SPEC,
) -> tuple[IntegralValue, bool]:
    """S(A f) for the operator image: adaptive cells plus analytic tails.

    Returns (value, truncated).  With ``tail_horizon`` set, a divergent
    tail integral is replaced by the integral up to the horizon and
    flagged instead of returning DIVERGENT; divergence at the origin is
    never truncated.
    """
    n = _check_geometry(element, op, w)
    prof = element.profile if isinstance(element, RadialDecreasingStep) else element
    evaluate, degree, mass, exact_tail, tail_factor = _image_data(element, op, n)
    if mass == 0.0:
        return 0.0, False
    factor, shift = _measure(w)
    finite_edges = [e for e in w.breakpoints() if math.isfinite(e)]
    x_last = max([prof.support_max] + list(p.breaks) + finite_edges)

    total = 0.0
    truncated = False
    pts = _merged_points(element, p, w, x_last)
    segments = []
    for l, u in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (l + u) if l == 0.0 else math.sqrt(l * u)
        piece = _piece_at(w, mid)
        if piece is None:
            continue
        pj = float(p.value(mid))
        ceff = piece.coeff * factor
        beff = piece.exponent + shift
        if l == 0.0:
            # the element is constant on (0, first knot), hence so is its image
            v0 = float(np.atleast_1d(evaluate(np.array([mid])))[0])
            cell = power_piece_integral(ceff, beff, 0.0, u)
            if is_divergent(cell):
                return DIVERGENT, False
            total += v0**pj * cell
        else:
            segments.append((l, u, pj, ceff, beff))
    if segments:
        seg = np.array(segments)
        # fractional images have (x - knot)^alpha kinks at each cell's left
        # edge; the substituted rows remove them
        seg = cell_rows(*seg.T, smooth_edge=op.kind in ("R", "I"))
        total += integrate_batched_cells(evaluate, seg, spec, scale_hint=abs(total))

    p_final = p.values[-1]
    for piece in w.pieces:
        if piece.hi <= x_last:
            continue
        l = max(piece.lo, x_last)
        ceff = piece.coeff * factor
        beff = piece.exponent + shift
        gamma = beff - degree * p_final
        if exact_tail:
            part = power_piece_integral(ceff * mass**p_final, gamma, l, piece.hi)
            if is_divergent(part):
                if tail_horizon is None:
                    return DIVERGENT, False
                truncated = True
                cap = min(piece.hi, max(tail_horizon, l))
                if cap > l:
                    total += power_piece_integral(ceff * mass**p_final, gamma, l, cap)
            else:
                total += part
            continue

        smooth = l == prof.support_max  # the image's last fractional kink sits there
        if math.isfinite(piece.hi):
            segs = _decade_segments(l, piece.hi, p_final, ceff, beff, smooth_first=smooth)
        elif gamma < -1.0:
            # cutoff where the analytic bound ceff (C*mass)^p x^gamma drops
            # below the accuracy the finite part already carries
            bound = ceff * (tail_factor * mass) ** p_final
            tol_eff = max(spec.abs_tol, spec.rel_tol * abs(total))
            cut = (tol_eff * abs(gamma + 1.0) / bound) ** (1.0 / (gamma + 1.0))
            cut = max(cut, 2.0 * l)
            segs = _decade_segments(l, cut, p_final, ceff, beff, smooth_first=smooth)
        else:
            if tail_horizon is None:
                return DIVERGENT, False
            truncated = True
            if tail_horizon <= l:
                continue
            segs = _decade_segments(l, tail_horizon, p_final, ceff, beff, smooth_first=smooth)
        total += integrate_batched_cells(evaluate, segs, spec, scale_hint=abs(total))
    return total, truncated


def _ratio_with_flag(
    element: ConeElement,
    op: OperatorSpec,
    p: ExponentFunction,
    w: Weight,
    tail_horizon: Optional[float],
    spec: QuadratureSpec = LAB_SPEC,
) -> tuple[IntegralValue, bool]:
    den = modular(element, p, w)
    if not den.finite or den.value <= 0.0:
        raise DivergentDenominatorError(
            "the modular of the cone element must be positive and finite"
        )
    num, truncated = image_modular(element, op, p, w, tail_horizon, spec)
    if is_divergent(num):
        return DIVERGENT, False
    return num / den.value, truncated


def ratio_Q(
    element: ConeElement,
    op: OperatorSpec,
    p: ExponentFunction,
    w: Weight,
    tail_horizon: Optional[float] = None,
) -> IntegralValue:
    """Modular ratio S(A f) / S(f); DIVERGENT when the numerator diverges.

    With ``tail_horizon`` the divergent-tail part of the numerator is
    truncated at the horizon, giving the finite surrogate the search
    maximizes; exact values are returned whenever the true integral is
    finite.
    """
    value, _ = _ratio_with_flag(element, op, p, w, tail_horizon)
    return value


# ----------------------------------------------------------------------------
# best-constant search


@dataclass(frozen=True)
class SearchResult:
    best_ratio: float
    argmax: Optional[ConeElement]
    evaluations: int
    trajectory: tuple[tuple[int, float], ...]
    tail_truncated: bool
    tail_horizon: Optional[float]
    seed: Optional[int]
    everywhere_divergent: bool = False

    def best_at(self, evaluations: int) -> float:
        """Best-so-far ratio after the given number of evaluations."""
        best = -math.inf
        for k, v in self.trajectory:
            if k <= evaluations:
                best = v
            else:
                break
        return best


def _seed_candidates(
    radial: bool,
    n: Optional[int],
    knot_bounds: tuple[float, float],
    height_bounds: tuple[float, float],
    max_pieces: int,
) -> list[ConeElement]:
    klo, khi = knot_bounds
    hlo, hhi = height_bounds
    out: list[DecreasingStep] = []
    for s in np.geomspace(klo, khi, 9):
        out.append(DecreasingStep.indicator(float(s)))
    for h in (1e-8, 1e-4, 1e4, 1e8):
        h = float(np.clip(h, hlo, hhi))
        for s in (1e-2, 1.0, 1e2):
            out.append(DecreasingStep.indicator(float(np.clip(s, klo, khi)), h))
    lams = [0.2, 0.3, 0.4, 0.45, 0.49]
    if radial:
        # profiles near rho^(1-n) drive the radial blow-ups
        lams += [v for v in (n - 1.0 - 0.3, float(n - 1), n - 1.0 + 0.45) if v > 0.0]
    m = min(48, max_pieces)
    for lam in lams:
        base = power_step(lam, m, klo, 1.0)
        heights = tuple(np.clip(base._heights_arr, hlo, hhi))
        out.append(DecreasingStep(base.knots, heights))
    if radial:
        return [RadialDecreasingStep(n, f) for f in out]
    return out


def _perturbed(prof: DecreasingStep, coord: int, delta: float,
               knot_bounds, height_bounds) -> DecreasingStep:
    m = prof.piece_count
    logk = np.log10(prof._knots_arr)
    logh = np.log10(np.maximum(prof._heights_arr, height_bounds[0]))
    if coord < m:
        logk[coord] += delta
    else:
        logh[coord - m] += delta
    knots = np.sort(np.clip(10.0**logk, *knot_bounds))
    for i in range(1, m):
        if knots[i] <= knots[i - 1]:
            knots[i] = np.nextafter(knots[i - 1], np.inf)
    heights = np.clip(np.sort(10.0**logh)[::-1], *height_bounds)
    return DecreasingStep(tuple(knots), tuple(heights))


def _split_widest(prof: DecreasingStep, max_pieces: int) -> Optional[DecreasingStep]:
    if prof.piece_count >= max_pieces:
        return None
    grid = prof._grid
    widths = np.log(grid[1:] / np.maximum(grid[:-1], grid[1:] * 1e-6))
    i = int(np.argmax(widths))
    new_knot = math.sqrt(max(grid[i], grid[i + 1] * 1e-6) * grid[i + 1])
    knots = list(prof.knots)
    heights = list(prof.heights)
    knots.insert(i, new_knot)
    heights.insert(i, heights[i])  # same value; later height moves differentiate it
    return DecreasingStep(tuple(knots), tuple(heights))


def best_constant_search(
    op: OperatorSpec,
    p: ExponentFunction,
    w: Weight,
    budget: int,
    seed: int = 0,
    strategy: str = "ascent",
    seeds: Optional[Sequence[ConeElement]] = None,
    max_pieces: int = 64,
    knot_bounds: tuple[float, float] = (1e-4, 1e4),
    height_bounds: tuple[float, float] = (1e-8, 1e8),
    tail_horizon: Optional[float] = 1e4,
    stop_at: Optional[float] = None,
) -> SearchResult:
    """Maximize the modular ratio over the cone, deterministically in the seed.

    Structured starting points (indicator family, scaled indicators and
    power-step near-extremizers) are evaluated first, then random restarts
    interleave with coordinate ascent on log-knots and log-heights, always
    projecting back onto the decreasing cone.  The budget counts ratio
    evaluations; the best-so-far trajectory is recorded at improvements.
    ``stop_at`` ends the search once the best ratio reaches it (the
    blow-up verdict is already decided there, the supremum is not wanted).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if strategy not in ("ascent", "seeds-only"):
        raise ValueError("strategy must be 'ascent' or 'seeds-only'")
    n = w.dimension if op.radial else None
    rng = np.random.default_rng(seed)

    evals = 0
    any_valid = False
    best_val = -math.inf
    best_elem: Optional[ConeElement] = None
    best_flag = False
    trajectory: list[tuple[int, float]] = []

    def wrap(prof: DecreasingStep) -> ConeElement:
        return RadialDecreasingStep(n, prof) if op.radial else prof

    def profile_of(elem: ConeElement) -> DecreasingStep:
        return elem.profile if isinstance(elem, RadialDecreasingStep) else elem

    def consider(elem: ConeElement) -> bool:
        nonlocal evals, any_valid, best_val, best_elem, best_flag
        if evals >= budget:
            return False
        if stop_at is not None and best_val >= stop_at:
            return False
        evals += 1
        try:
            val, flag = _ratio_with_flag(elem, op, p, w, tail_horizon)
        except (DivergentDenominatorError, QuadratureError):
            return True
        if is_divergent(val):
            return True
        any_valid = True
        if val > best_val:
            best_val, best_elem, best_flag = val, elem, flag
            trajectory.append((evals, val))
        return True

    pool = list(seeds) if seeds else []
    pool += _seed_candidates(op.radial, n, knot_bounds, height_bounds, max_pieces)
    keep_going = True
    for cand in pool:
        if not consider(cand):
            keep_going = False
            break

    coord = 0
    sigma = 0.25
    stale = 0
    ascent_count = 0
    while keep_going and evals < budget and strategy == "ascent":
        if stop_at is not None and best_val >= stop_at:
            break
        for _ in range(5):
            m = int(rng.integers(1, 9))
            cand = wrap(random_decreasing(rng, m, knot_bounds, (1e-3, 1e3)))
            if not consider(cand):
                break
        improved_any = False
        for _ in range(25):
            if evals >= budget or best_elem is None:
                break
            prof = profile_of(best_elem)
            ascent_count += 1
            if ascent_count % 12 == 0:
                split = _split_widest(prof, max_pieces)
                if split is not None:
                    prev = best_val
                    if not consider(wrap(split)):
                        break
                    improved_any = improved_any or best_val > prev
                    continue
            dim = 2 * prof.piece_count
            delta = sigma if rng.integers(2) else -sigma
            cand = _perturbed(prof, coord % dim, delta, knot_bounds, height_bounds)
            coord += 1
            prev = best_val
            if not consider(wrap(cand)):
                break
            improved_any = improved_any or best_val > prev
        if improved_any:
            stale = 0
        else:
            stale += 1
            if stale >= 2:
                sigma = max(sigma * 0.5, 1e-3)
                stale = 0
    return SearchResult(
        best_ratio=best_val if any_valid else math.nan,
        argmax=best_elem,
        evaluations=evals,
        trajectory=tuple(trajectory),
        tail_truncated=best_flag,
        tail_horizon=tail_horizon,
        seed=seed,
        everywhere_divergent=not any_valid,
    )


# ----------------------------------------------------------------------------
# polar reduction


@dataclass(frozen=True)
class PolarPair:
    """Both sides of the polar-coordinate reduction of the ball-average modular.

    lhs integrates (Hg)^r u over R^n; rhs_reduced is
    sigma^r * int u_tilde(t) (T g_bar(t))^r dt with g_bar(t) = t^(n-1) g(t)
    and u_tilde(t) = sigma * t^((n-1)(1-r)) * u(t).  The chain is a change
    of variables, so the two sides agree identically.
    """

    lhs: IntegralValue
    rhs_reduced: IntegralValue
    dimension: int
    exponent_r: float
    u_tilde: Weight

    def __post_init__(self):
        if is_divergent(self.lhs) != is_divergent(self.rhs_reduced):
            raise AssertionError("the reduction must diverge on both sides or neither")

    @property
    def relative_gap(self) -> float:
        if is_divergent(self.lhs):
            return 0.0
        scale = max(abs(self.lhs), abs(self.rhs_reduced), 1e-300)
        return abs(self.lhs - self.rhs_reduced) / scale


def polar_reduce(
    g: RadialDecreasingStep,
    u: Weight,
    r: float,
    spec: QuadratureSpec = LAB_SPEC,
) -> PolarPair:
    if r <= 0.0:
        raise ValueError("r must be positive")
    if not u.is_radial or u.dimension != g.dimension:
        raise ValueError("u must be radial in the dimension of g")
    n = g.dimension
    sigma = unit_sphere_area(n)
    lhs, _ = image_modular(g, OperatorSpec("H"), ExponentFunction.constant(r), u, None, spec)

    u_tilde = Weight(
        tuple(
            (piece.lo, piece.hi, sigma * piece.coeff, piece.exponent + (n - 1.0) * (1.0 - r))
            for piece in u.pieces
        ),
        None,
    )
    prof = g.profile
    mass_bar = g.radial_moment_cumulative(prof.support_max)

    def t_average(ts):
        ts = np.asarray(ts, dtype=float)
        return g.radial_moment_cumulative(ts) / ts

    finite_edges = [e for e in u_tilde.breakpoints() if math.isfinite(e)]
    x_last = max([prof.support_max] + finite_edges)
    pts = {0.0, x_last}
    pts.update(k for k in prof.knots if k < x_last)
    pts.update(e for e in u_tilde.breakpoints() if 0.0 < e < x_last)
    pts = sorted(pts)

    total: IntegralValue = 0.0
    for l, hgh in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (l + hgh) if l == 0.0 else math.sqrt(l * hgh)
        piece = _piece_at(u_tilde, mid)
        if piece is None:
            continue
        if l == 0.0:
            # T g_bar(t) = a1 t^(n-1)/n exactly on the first cell: a pure power
            a1 = prof.heights[0]
            coeff = (a1 / n) ** r * piece.coeff
            cell = power_piece_integral(coeff, piece.exponent + r * (n - 1.0), 0.0, hgh)
            if is_divergent(cell):
                total = DIVERGENT
                break
            total += cell
        else:
            def integrand(ts, _c=piece.coeff, _b=piece.exponent):
                ts = np.asarray(ts, dtype=float)
                return t_average(ts) ** r * _c * ts**_b

            total += integrate_adaptive(integrand, l, hgh, spec).value
    if not is_divergent(total):
        for piece in u_tilde.pieces:
            if piece.hi <= x_last:
                continue
            l = max(piece.lo, x_last)
            part = power_piece_integral(piece.coeff * mass_bar**r, piece.exponent - r, l, piece.hi)
            if is_divergent(part):
                total = DIVERGENT
                break
            total += part
    rhs = DIVERGENT if is_divergent(total) else sigma**r * total
    return PolarPair(lhs, rhs, n, r, u_tilde)


# ----------------------------------------------------------------------------
# pointwise equivalence and the three-way consistency check


@dataclass(frozen=True)
class EquivalenceReport:
    kind: str
    alpha: float
    dimension: Optional[int]
    lower: float
    upper: float
    min_ratio: float
    max_ratio: float
    points: int


def equivalence_check(
    element: ConeElement,
    alpha: float,
    points=None,
    tol: float = 1e-10,
) -> EquivalenceReport:
    """Pointwise fractional/average ratio range over a sample grid.

    Raises SandwichViolationError if the range leaves [lower - tol,
    upper + tol]; the averaging value is positive wherever the element is
    nonzero, so the ratio is well defined on the whole grid.
    """
    radial = isinstance(element, RadialDecreasingStep)
    if radial:
        cst = sandwich_constants("I-vs-H", alpha, element.dimension)
        if element.profile.mass == 0.0:
            raise ValueError("the zero element has no ratio")
        xs = sample_grid(element) if points is None else np.asarray(points, dtype=float)
        avg = ball_average(element, xs)
        frac = np.array([truncated_potential(element, float(x), alpha) for x in xs])
    else:
        cst = sandwich_constants("R-vs-T", alpha)
        if element.mass == 0.0:
            raise ValueError("the zero element has no ratio")
        xs = sample_grid(element) if points is None else np.asarray(points, dtype=float)
        avg = hardy_average(element, xs)
        frac = riemann_liouville(element, xs, alpha)
    ratios = frac / avg
    lo, hi = float(np.min(ratios)), float(np.max(ratios))
    if lo < cst.lower - tol or hi > cst.upper + tol:
        raise SandwichViolationError(
            f"ratio range [{lo}, {hi}] escapes [{cst.lower}, {cst.upper}] (tol {tol})"
        )
    return EquivalenceReport(cst.kind, cst.alpha, cst.dimension, cst.lower, cst.upper,
                             lo, hi, len(xs))


@dataclass(frozen=True)
class ConsistencyReport:
    """Three verdicts on one inequality: condition, characterization, empirics."""

    operator: OperatorSpec
    condition_verdict: Optional[bool]  # None when the sweep was vacuous
    characterization_verdict: bool
    empirical_verdict: str  # "bounded" | "unbounded" | "inconclusive"
    agree: bool
    p_constant: bool
    p0: Optional[float]
    condition_report: ConditionReport
    br_report: Optional[ConditionReport]
    best_at_budget: float
    best_final: float
    budget: int
    blowup_threshold: float
    search: SearchResult


def theorem_consistency(
    op: OperatorSpec,
    p: ExponentFunction,
    w: Weight,
    budget: int = 1500,
    seed: int = 0,
    blowup_threshold: float = 1e3,
    stability_tol: float = 0.05,
    tail_horizon: Optional[float] = 1e4,
) -> ConsistencyReport:
    """Cross-check the three equivalent faces of the one-weight inequality.

    Verdict 1: the variable-exponent integral condition (swept).
    Verdict 2: exponent constant on supp w and the order-p0 weight
    condition for the matching geometry.
    Verdict 3: empirical boundedness of the modular ratio (search stays
    under the blow-up threshold and is budget-stable, against exceeding
    the threshold).  Requires the oscillation of p to vanish at the
    origin on supp w; otherwise the equivalences do not apply and this
    raises ConeHypothesisError.
    """
    if not vanishing_oscillation_at_origin(p, w):
        raise ConeHypothesisError(
            "the local oscillation of the exponent does not vanish at 0+ on supp w; "
            "the equivalence theorems do not apply to this pair"
        )
    if op.radial != w.is_radial:
        raise ValueError("operator and weight geometry must agree")

    cond = check_br_variable_radial(w, p) if op.radial else check_br_variable(w, p)
    if cond.holds is True:
        verdict1: Optional[bool] = True
    elif cond.holds is False:
        verdict1 = False
    else:
        verdict1 = None

    pieces = _essential_pieces(p, w)
    values = {val for _, _, val in pieces}
    p_constant = len(values) == 1
    p0 = values.pop() if p_constant else None
    br = None
    if p_constant:
        br = check_br_radial(w, p0) if op.radial else check_br(w, p0)
    verdict2 = bool(p_constant and br is not None and br.holds is True)

    search = best_constant_search(op, p, w, budget=2 * budget, seed=seed,
                                  tail_horizon=tail_horizon, stop_at=blowup_threshold)
    best1 = search.best_at(budget)
    best2 = search.best_ratio
    if search.everywhere_divergent:
        empirical = "unbounded"
    elif best2 >= blowup_threshold or search.tail_truncated:
        empirical = "unbounded"
    elif best2 <= best1 * (1.0 + stability_tol):
        empirical = "bounded"
    else:
        empirical = "inconclusive"

    agree = (verdict1 is True and verdict2 and empirical == "bounded") or (
        verdict1 is False and not verdict2 and empirical == "unbounded"
    )
    return ConsistencyReport(
        operator=op,
        condition_verdict=verdict1,
        characterization_verdict=verdict2,
        empirical_verdict=empirical,
        agree=agree,
        p_constant=p_constant,
        p0=p0,
        condition_report=cond,
        br_report=br,
        best_at_budget=best1,
        best_final=best2,
        budget=budget,
        blowup_threshold=blowup_threshold,
        search=search,
    )
