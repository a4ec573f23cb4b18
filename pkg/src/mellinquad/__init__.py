"""Mellin-Poisson quadrature on the half-line at configurable precision."""

from .corpus import CorpusEntry, branch_point, exp_decay, lookup, sinc_power, sobolev_example
from .error_rates import (
    Bandlimited,
    ExponentialRate,
    PolynomialRate,
    RateDiagnostics,
    SpaceClass,
    bound_sobolev_dist,
    classify_decay,
    moebius_invert,
    rate_diagnostics,
    remainder_translated_sup,
)
from .mellin_core import (
    DistanceGrid,
    FunctionSpec,
    MellinPoint,
    Regularity,
    dist_infinity,
    mellin_even_part,
    mellin_odd_part,
    mellin_transform_numeric,
    mellin_translate,
    zero_function,
)
from .numerics import DEFAULT_PRECISION, ConvergenceError, DomainError, HPComplex, HPReal, moebius, zeta
from .quadrature import (
    QuadratureResult,
    TruncationPlan,
    plan_branch_point,
    plan_gamma,
    plan_sinc_power,
    poisson_identity_residual,
    quad_sum,
    remainder_from_transform,
)

__all__ = [
    "Bandlimited",
    "ConvergenceError",
    "CorpusEntry",
    "DEFAULT_PRECISION",
    "DistanceGrid",
    "DomainError",
    "ExponentialRate",
    "FunctionSpec",
    "HPComplex",
    "HPReal",
    "MellinPoint",
    "PolynomialRate",
    "QuadratureResult",
    "RateDiagnostics",
    "Regularity",
    "SpaceClass",
    "TruncationPlan",
    "bound_sobolev_dist",
    "branch_point",
    "classify_decay",
    "dist_infinity",
    "exp_decay",
    "lookup",
    "mellin_even_part",
    "mellin_odd_part",
    "mellin_transform_numeric",
    "mellin_translate",
    "moebius",
    "moebius_invert",
    "plan_branch_point",
    "plan_gamma",
    "plan_sinc_power",
    "poisson_identity_residual",
    "quad_sum",
    "rate_diagnostics",
    "remainder_from_transform",
    "remainder_translated_sup",
    "sinc_power",
    "sobolev_example",
    "zero_function",
    "zeta",
]
