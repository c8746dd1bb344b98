"""hardycone: one-weight inequalities for averaging and fractional operators
on cones of non-negative decreasing functions, at desk scale.

The package evaluates the Hardy averages and their fractional companions
on decreasing step functions, decides the matching weight conditions by
closed-form sup-ratio sweeps, estimates best constants by search over the
cone, and cross-checks that the three faces of each characterization
(integral condition, constant-exponent reduction, empirical boundedness)
tell the same story.
"""

from .cone import (
    DecreasingStep,
    RadialDecreasingStep,
    power_approximant,
    power_step,
    random_decreasing,
    random_radial,
)
from .conditions import (
    ConditionReport,
    ViolationOutcome,
    check_br,
    check_br_radial,
    check_br_variable,
    check_br_variable_radial,
    default_sweep,
    find_violation,
    violation_slope,
)
from .lab import (
    ConeHypothesisError,
    ConsistencyReport,
    DivergentDenominatorError,
    EquivalenceReport,
    ModularValue,
    OperatorSpec,
    PolarPair,
    SandwichViolationError,
    SearchResult,
    best_constant_search,
    equivalence_check,
    modular,
    polar_reduce,
    ratio_Q,
    theorem_consistency,
)
from .operators import (
    FractionalOrder,
    SandwichConstants,
    ball_average,
    hardy_average,
    riemann_liouville,
    sandwich_constants,
    truncated_potential,
    truncated_potential_batch,
)
from .quadrature import (
    EndpointSingularity,
    QuadratureError,
    QuadratureSpec,
    angular_kernel,
    integrate_adaptive,
    integrate_tail,
)
from .weights import (
    DIVERGENT,
    ExponentFunction,
    OscillationProfile,
    Weight,
    WeightPiece,
    ball_volume,
    is_divergent,
    oscillation,
    oscillation_limit,
    oscillation_profile,
    unit_sphere_area,
    vanishing_oscillation_at_origin,
    weight_integral,
)

__version__ = "0.1.0"
