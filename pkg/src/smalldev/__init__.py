"""Small-deviation asymptotics of random-walk maxima.

Exact Brownian sup-norm band probabilities, the weighted series over indices
n with its normalized limit, a convergence dichotomy for boundary functions,
and reproducible Monte Carlo estimation anchored by exact oracles.
"""

__version__ = "0.1.0"

from .brownian import BrownianCdfResult, sup_cdf, sup_cdf_asymptotic, wiener_term_prob
from .dichotomy import DiagnosticTable, PsiSpec, Verdict, classify_psi, partial_sum_diagnostic
from .errors import DivergentSeriesError, DomainError
from .params import DriftSpec, WeightParams
from .scaling import log_ve, loglog_ve, phi
from .series import (LimitProbeResult, SeriesResult, critical_threshold,
                     eps_for_lambda, limit_constant, limit_probe,
                     weighted_series_wiener)
from .simulate import (ExponentPoint, GridOracleResult, IncrementLaw,
                       MCEstimate, WalkMaxSample, draw_increments,
                       estimate_small_dev, exponent_check,
                       gaussian_grid_oracle, rademacher_oracle,
                       sample_walk_max, substream, walk_max_samples,
                       wilson_interval)
from .specfun import TailIntegralResult, gamma_fn, tail_integral

__all__ = [
    "__version__",
    "BrownianCdfResult", "sup_cdf", "sup_cdf_asymptotic", "wiener_term_prob",
    "DiagnosticTable", "PsiSpec", "Verdict", "classify_psi", "partial_sum_diagnostic",
    "DivergentSeriesError", "DomainError",
    "DriftSpec", "WeightParams",
    "log_ve", "loglog_ve", "phi",
    "LimitProbeResult", "SeriesResult", "critical_threshold", "eps_for_lambda",
    "limit_constant", "limit_probe", "weighted_series_wiener",
    "ExponentPoint", "GridOracleResult", "IncrementLaw", "MCEstimate",
    "WalkMaxSample", "draw_increments", "estimate_small_dev", "exponent_check",
    "gaussian_grid_oracle", "rademacher_oracle", "sample_walk_max",
    "substream", "walk_max_samples", "wilson_interval",
    "TailIntegralResult", "gamma_fn", "tail_integral",
]
