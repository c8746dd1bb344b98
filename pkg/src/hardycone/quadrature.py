"""Adaptive quadrature with power-substitution for endpoint singularities.

Closed forms cover almost every integral in this package; the engine here
handles the rest: integrable endpoint singularities of known exponent,
infinite tails with known power decay, and the angular kernel of the
n-dimensional truncated potential.

Integrands are expected to be numpy-vectorized: called with an ndarray of
abscissae, returning an ndarray of values.  All internal callers comply;
wrap scalar callables with ``numpy.vectorize`` if needed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .weights import unit_sphere_area

__all__ = [
    "QuadratureError",
    "EndpointSingularity",
    "QuadratureSpec",
    "QuadResult",
    "DEFAULT_SPEC",
    "integrate_adaptive",
    "integrate_tail",
    "angular_kernel",
]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class EndpointSingularity:
    """Annotation: integrand behaves like |x - location|**exponent there."""

    location: float
    exponent: float


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    singularities: tuple[EndpointSingularity, ...] = ()

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def with_singularities(self, *sing: EndpointSingularity) -> "QuadratureSpec":
        return replace(self, singularities=tuple(sing))


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float


# Gauss-Kronrod 15(7) on [-1, 1]; Kronrod nodes/weights plus embedded Gauss weights.
_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691, 0.741531185599394,
    0.864864423359769, 0.949107912342759, 0.991455371120813,
])
_GK_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_GAUSS_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])


def _gk15(func, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    xs = mid + half * _GK_NODES
    ys = np.asarray(func(xs), dtype=float)
    if not np.all(np.isfinite(ys)):
        raise QuadratureError(f"integrand not finite inside ({a}, {b})")
    kron = half * float(_GK_WEIGHTS @ ys)
    gauss = half * float(_GAUSS_WEIGHTS @ ys[_GAUSS_IDX])
    return kron, abs(kron - gauss)


def _adaptive_core(func, a: float, b: float, spec: QuadratureSpec) -> QuadResult:
    kron, err = _gk15(func, a, b)
    heap = [(-err, 0, a, b, kron, err)]
    total_val, total_err = kron, err
    counter = 0
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
            return QuadResult(total_val, total_err)
        neg_err, _, lo, hi, val, errv = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval at floating point resolution; cannot refine further
            heapq.heappush(heap, (neg_err, counter, lo, hi, val, errv))
            break
        counter += 1
        k1, e1 = _gk15(func, lo, mid)
        k2, e2 = _gk15(func, mid, hi)
        total_val += k1 + k2 - val
        total_err += e1 + e2 - errv
        heapq.heappush(heap, (-e1, counter, lo, mid, k1, e1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, k2, e2))
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
        return QuadResult(total_val, total_err)
    raise QuadratureError(
        f"no convergence on ({a}, {b}) after {spec.max_subdivisions} subdivisions "
        f"(error estimate {total_err:.3e})"
    )


def _substituted(func, endpoint: float, exponent: float, side: int):
    """Transform away an endpoint power singularity.

    With s = 1/(1 + exponent), substituting x = endpoint +/- u**s turns
    C*|x-endpoint|**exponent * dx into C*s du, a bounded integrand.
    """
    s = 1.0 / (1.0 + exponent)

    def g(us):
        us = np.asarray(us, dtype=float)
        xs = endpoint + side * us**s
        return np.asarray(func(xs), dtype=float) * s * us ** (s - 1.0)

    return g


def integrate_adaptive(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuadResult:
    """Adaptive Gauss-Kronrod integral of func over finite [a, b].

    Endpoint singularities annotated in the spec (exponent in (-1, 0)) are
    removed by the power substitution u = (x - endpoint)**(1+exponent)
    before subdividing; exponents <= -1 are rejected as divergent,
    exponents >= 0 need no treatment.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise ValueError("require finite a <= b")
    if a == b:
        return QuadResult(0.0, 0.0)
    left = right = None
    for sing in spec.singularities:
        if sing.exponent <= -1.0:
            raise QuadratureError(f"non-integrable singularity exponent {sing.exponent}")
        if sing.exponent >= 0.0:
            continue
        if sing.location == a:
            left = sing
        elif sing.location == b:
            right = sing
        else:
            raise ValueError("singularity annotations must sit at an endpoint")

    plain_spec = spec.with_singularities()
    if left is None and right is None:
        return _adaptive_core(func, a, b, plain_spec)
    if left is not None and right is not None:
        mid = 0.5 * (a + b)
        g1 = _substituted(func, a, left.exponent, +1)
        r1 = _adaptive_core(g1, 0.0, (mid - a) ** (1.0 + left.exponent), plain_spec)
        g2 = _substituted(func, b, right.exponent, -1)
        r2 = _adaptive_core(g2, 0.0, (b - mid) ** (1.0 + right.exponent), plain_spec)
        return QuadResult(r1.value + r2.value, r1.error + r2.error)
    if left is not None:
        g = _substituted(func, a, left.exponent, +1)
        return _adaptive_core(g, 0.0, (b - a) ** (1.0 + left.exponent), plain_spec)
    g = _substituted(func, b, right.exponent, -1)
    return _adaptive_core(g, 0.0, (b - a) ** (1.0 + right.exponent), plain_spec)


def cell_rows(lo, hi, p, c, b, smooth_edge: bool = False) -> np.ndarray:
    """Rows for :func:`integrate_batched_cells` (arrays broadcast).

    With ``smooth_edge`` the cell is parameterized as x = lo + (hi-lo) t^2,
    t in (0, 1): fractional kinks (x - lo)^a at the left edge become t^(2a),
    polynomial for the half-integer orders and far tamer otherwise.
    """
    lo, hi, p, c, b = np.broadcast_arrays(
        *(np.atleast_1d(np.asarray(v, dtype=float)) for v in (lo, hi, p, c, b))
    )
    rows = np.empty((len(lo), 7))
    if smooth_edge:
        rows[:, 0] = 0.0
        rows[:, 1] = 1.0
        rows[:, 5] = lo
        rows[:, 6] = hi - lo
    else:
        rows[:, 0] = lo
        rows[:, 1] = hi
        rows[:, 5] = 0.0
        rows[:, 6] = np.nan  # width unused for plain cells
    rows[:, 2] = p
    rows[:, 3] = c
    rows[:, 4] = b
    return rows


def integrate_batched_cells(
    evaluate: Callable[[np.ndarray], np.ndarray],
    segments: np.ndarray,
    spec: QuadratureSpec = DEFAULT_SPEC,
    scale_hint: float = 0.0,
    max_rounds: int = 30,
    max_segments: int = 40000,
) -> float:
    """Sum of integrals of evaluate(x)**p * c * x**b over many smooth cells.

    ``segments`` rows come from :func:`cell_rows`: plain rows carry the
    x-interval directly, smooth-edge rows carry a t-interval mapped through
    x = x0 + w t^2.  All cells of a refinement round are evaluated in a
    single vectorized call, which is what makes the search objective
    affordable; cells whose Gauss-Kronrod discrepancy misses the tolerance
    are bisected (in their own coordinate) and re-queued.  ``scale_hint``
    is the magnitude of the surrounding sum: cells contributing relative
    noise below it are accepted, which matters in far tails where the
    integrand itself carries cancellation noise.
    """
    seg = np.asarray(segments, dtype=float)
    if seg.size == 0:
        return 0.0
    if seg.shape[1] == 5:
        seg = cell_rows(*seg.T)
    floor = max(spec.abs_tol, 0.02 * spec.rel_tol * scale_hint)
    total = 0.0
    for _ in range(max_rounds):
        lo, hi, ps, cs, bs, x0, width = seg.T
        transformed = np.isfinite(width)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        ts = mid[:, None] + half[:, None] * _GK_NODES[None, :]
        xs = np.where(transformed[:, None], x0[:, None] + np.nan_to_num(width)[:, None] * ts**2, ts)
        jac = np.where(transformed[:, None], 2.0 * np.nan_to_num(width)[:, None] * ts, 1.0)
        ys = np.asarray(evaluate(xs.ravel()), dtype=float).reshape(xs.shape)
        vals = ys ** ps[:, None] * cs[:, None] * xs ** bs[:, None] * jac
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("integrand not finite inside a cell")
        kron = half * (vals @ _GK_WEIGHTS)
        gauss = half * (vals[:, _GAUSS_IDX] @ _GAUSS_WEIGHTS)
        err = np.abs(kron - gauss)
        ok = err <= np.maximum(floor, spec.rel_tol * np.abs(kron))
        # a cell at floating-point resolution cannot be refined further
        ok |= mid - lo <= np.maximum(np.abs(mid), 1e-300) * 1e-15
        total += float(kron[ok].sum())
        if np.all(ok):
            return total
        bad = seg[~ok]
        mid_bad = mid[~ok]
        lower = bad.copy()
        lower[:, 1] = mid_bad
        upper = bad.copy()
        upper[:, 0] = mid_bad
        seg = np.vstack((lower, upper))
        if len(seg) > max_segments:
            raise QuadratureError("cell refinement exploded; integrand likely singular")
    raise QuadratureError(f"no convergence after {max_rounds} refinement rounds")


def integrate_tail(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    gamma: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    bound_coeff: Optional[float] = None,
) -> QuadResult:
    """Integral of func over [a, inf) given |func(x)| <= K * x**gamma there.

    gamma < -1 is required (anything else diverges or is unverifiable).
    The truncation point X is chosen so the analytic tail bound
    K * X**(gamma+1) / |gamma+1| falls below the absolute tolerance, and
    [a, X] is integrated adaptively.
    """
    if gamma >= -1.0:
        raise ValueError("tail decay exponent must be < -1")
    if a <= 0.0:
        raise ValueError("tail integration starts at a positive abscissa")
    if bound_coeff is None:
        probes = a * np.array([1.0, 2.0, 4.0, 8.0])
        vals = np.abs(np.asarray(func(probes), dtype=float))
        bound_coeff = 2.0 * float(np.max(vals / probes**gamma))
    if bound_coeff <= 0.0:
        cutoff = 2.0 * a
    else:
        cutoff = (spec.abs_tol * abs(gamma + 1.0) / bound_coeff) ** (1.0 / (gamma + 1.0))
        cutoff = max(cutoff, 2.0 * a)
    res = integrate_adaptive(func, a, cutoff, spec)
    return QuadResult(res.value, res.error + spec.abs_tol)


def _kernel_generic_gap(n: int, R: float, rho: float, gap: float,
                        alpha: float, spec: QuadratureSpec) -> float:
    """Polar-angle quadrature of the sphere integral for 2 <= n <= 8.

    The squared distance is assembled from the gap |R - rho| directly,
    gap^2 + 2 R rho (1 - cos theta), so radii arbitrarily close to R lose
    no precision.
    """
    gap2 = gap * gap
    b2 = 2.0 * R * rho
    power = 0.5 * (alpha - n)

    def integrand(thetas):
        thetas = np.asarray(thetas, dtype=float)
        dist2 = gap2 + b2 * 2.0 * np.sin(0.5 * thetas) ** 2
        return dist2**power * np.sin(thetas) ** (n - 2)

    sings = ()
    if gap == 0.0:
        if alpha <= 1.0:
            return math.inf
        if alpha < 2.0:
            # near theta = 0 the integrand behaves like theta**(alpha-2)
            sings = (EndpointSingularity(0.0, alpha - 2.0),)
    res = integrate_adaptive(integrand, 0.0, math.pi, spec.with_singularities(*sings))
    return unit_sphere_area(n - 1) * res.value


def angular_kernel(
    n: int,
    R: float,
    rho: float,
    alpha: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Sphere average K_n(R, rho, alpha) = int_{S^{n-1}} |R e1 - rho w|^(alpha-n) dsigma(w).

    Closed forms for n = 1 (two-point sphere) and n = 3 (elementary
    antiderivative in the polar cosine); adaptive polar-angle quadrature
    for the remaining 2 <= n <= 8.  At rho = R the value is +inf when
    alpha <= 1 (the radial integration treats that as an annotated
    endpoint singularity).
    """
    if R <= 0.0 or rho < 0.0:
        raise ValueError("require R > 0 and rho >= 0")
    if not (0.0 < alpha < n):
        raise ValueError("require 0 < alpha < n")
    return angular_kernel_gap(n, R, rho, abs(R - rho), alpha, spec)


def angular_kernel_gap(
    n: int,
    R: float,
    rho: float,
    gap: float,
    alpha: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Sphere average with the distance |R - rho| supplied explicitly.

    The radial quadrature near the sphere works in the offset variable, so
    passing the gap keeps the kernel exact where R - rho would round away.
    """
    if rho == 0.0:
        return unit_sphere_area(n) * R ** (alpha - n)
    if n == 1:
        far = (R + rho) ** (alpha - 1.0)
        if gap == 0.0:
            return math.inf if alpha < 1.0 else far
        return gap ** (alpha - 1.0) + far
    if n == 3:
        return _kernel3_parts(gap, 2.0 * min(R, rho), R * rho, alpha)
    if n > 8:
        raise ValueError("dimensions above 8 are not supported")
    return _kernel_generic_gap(n, R, rho, gap, alpha, spec)


def _kernel3_parts(gap, near, prod, alpha: float):
    """n = 3 closed form from gap = |R - rho|, near = 2 min(R, rho), prod = R rho.

    The distances enter as (gap + near)^(alpha-1) - gap^(alpha-1), which
    cancels badly both for rho near R (small gap) and for rho << R (small
    near); the log1p/expm1 form is stable in both regimes.
    """
    gap = np.asarray(gap, dtype=float)
    near = np.asarray(near, dtype=float)
    am1 = alpha - 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if alpha == 1.0:
            core = np.log1p(near / gap)
        else:
            core = gap**am1 * np.expm1(am1 * np.log1p(near / gap)) / am1
            if am1 > 0.0:
                # zero gap: gap^am1 * expm1(...) is 0 * inf; the limit is near^am1/am1
                core = np.where(gap == 0.0, near**am1 / am1, core)
    out = 2.0 * math.pi * core / prod
    if np.ndim(out) == 0:
        return float(out)
    return out


def kernel3(R, rho, alpha: float):
    """Closed form of the n = 3 sphere average; vectorized in R and rho."""
    R = np.asarray(R, dtype=float)
    rho = np.asarray(rho, dtype=float)
    return _kernel3_parts(np.abs(R - rho), 2.0 * np.minimum(R, rho), R * rho, alpha)
