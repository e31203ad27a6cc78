"""Psi-densities of real sets, growth orders and limit certification.

Positions are log coordinates: a cutoff ``x`` means ``r = e**x``.
"""

import math

from ._core import (
    ConvergenceError,
    DensityEstimate,
    DomainError,
    GrowthFunction,
    IntervalSet,
    OrderEstimate,
    ParseError,
    PreconditionError,
    PsiDensityError,
    PsiScale,
    ScalarFn,
    cesaro_psi_average,
    density_limit_certify,
    density_trajectory,
    divergence_witness,
    estimate_density,
    estimate_orders,
    estimate_type,
    integrate,
    log_spaced,
    parse_log_cutoff,
    run_cli,
    usual_limit_certify,
    verify_corollary,
    verify_limsup_sets,
)

__all__ = [
    "ConvergenceError",
    "DensityEstimate",
    "DomainError",
    "GrowthFunction",
    "IntervalSet",
    "OrderEstimate",
    "ParseError",
    "PreconditionError",
    "PsiDensityError",
    "PsiScale",
    "ScalarFn",
    "cesaro_psi_average",
    "density",
    "density_limit_certify",
    "density_trajectory",
    "divergence_witness",
    "estimate_density",
    "estimate_orders",
    "estimate_type",
    "integrate",
    "log_spaced",
    "parse_log_cutoff",
    "run_cli",
    "usual_limit_certify",
    "verify_corollary",
    "verify_limsup_sets",
]


def density(set_spec, psi="log", cutoff="1e24", tail_window=8):
    """Upper and lower psi-density of a set spec at a cutoff given as text or as log r."""
    x = parse_log_cutoff(cutoff) if isinstance(cutoff, str) else float(cutoff)
    if not math.isfinite(x):
        raise DomainError("cutoff must be finite")
    return estimate_density(IntervalSet.parse(set_spec), PsiScale.parse(psi), x, tail_window)
