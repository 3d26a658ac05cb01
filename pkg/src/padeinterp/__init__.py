"""Two-point Padé interpolation between weak- and strong-coupling expansions.

Modules
-------
polyrat     polynomials, rational functions, real-root isolation
pade2p      two-point Padé construction, series round trips, pole scan
accel       Wynn epsilon and Richardson extrapolation
twostate    the sigma_x + lambda sigma_z testbed
radial      Numerov bound states of -c u'' + (-a/r + b r) u = E u
perturb     beta-expansion coefficients of H_C + beta H_L
quarkonium  S-level predictions, fit quality, direct-integration oracle
fit         multistart Nelder-Mead over the potential parameters
cli         command-line entry point
"""
from .pade2p import AsymptoticSeries, PowerSeries, RationalInterpolant, build_two_point_pade, pole_report
from .quarkonium import QuarkoniumParams, fit_quality, load_levels, oracle_level, predict_level

__all__ = [
    "AsymptoticSeries",
    "PowerSeries",
    "RationalInterpolant",
    "build_two_point_pade",
    "pole_report",
    "QuarkoniumParams",
    "fit_quality",
    "load_levels",
    "oracle_level",
    "predict_level",
]
__version__ = "0.1.0"
