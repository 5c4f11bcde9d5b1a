"""Geometric-to-arithmetic mean ratio on weighted spheres."""

from ._core import (
    OptimizationFailure,
    WeightSequence,
    certified_interval,
    chebyshev_level,
    digamma,
    equal_weights,
    euclidean_center,
    exact_moment_euclidean,
    exact_moment_weighted,
    exp_neg_gamma,
    factor_decomposition,
    log_gamma,
    make_weights,
    product_power,
    simulate,
    stirling_remainder,
    two_level_weights,
    validate,
    weight_stats,
)

__all__ = [
    "OptimizationFailure",
    "WeightSequence",
    "certified_interval",
    "chebyshev_level",
    "digamma",
    "equal_weights",
    "euclidean_center",
    "exact_moment_euclidean",
    "exact_moment_weighted",
    "exp_neg_gamma",
    "factor_decomposition",
    "log_gamma",
    "make_weights",
    "product_power",
    "simulate",
    "stirling_remainder",
    "two_level_weights",
    "validate",
    "weight_stats",
]
