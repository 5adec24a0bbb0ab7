"""Small-deviation distribution of the Wiener sup-norm on [0, 1].

P(sup_{0<=s<=1} |W(s)| <= x) is evaluated by the alternating theta series

    (4/pi) * sum_{k>=0} (-1)^k / (2k+1) * exp(-pi^2 (2k+1)^2 / (8 x^2)).

Term magnitudes are strictly decreasing in k for every x > 0, so truncation
is certified by the alternating-series remainder bound: the first omitted
term's magnitude bounds the absolute error.  As x -> 0 the k = 0 term
dominates and the CDF is asymptotically (4/pi) exp(-pi^2/(8 x^2)); for all x
the CDF sits between (2/pi) and (4/pi) times that exponential.

All functions here are pure; they are safe to call concurrently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import DriftSpec
from .scaling import log_ve

__all__ = [
    "BrownianCdfResult",
    "sup_cdf",
    "sup_cdf_asymptotic",
    "wiener_term_prob",
]

_PI2_8 = math.pi ** 2 / 8.0
_FOUR_OVER_PI = 4.0 / math.pi


@dataclass(frozen=True)
class BrownianCdfResult:
    """Theta-series evaluation with a certified truncation error.

    value is clamped to [0, 1]; error_bound is the magnitude of the first
    omitted series term (including the 4/pi prefactor).
    """

    value: float
    k_terms: int
    error_bound: float


def sup_cdf(x: float, abs_tol: float = 1e-12) -> BrownianCdfResult:
    """P(sup_{0<=s<=1} |W(s)| <= x) to absolute tolerance abs_tol."""
    if not (x > 0.0) or math.isnan(x):
        raise DomainError(f"sup_cdf requires x > 0, got {x}")
    if not (0.0 < abs_tol < 1.0):
        raise DomainError(f"abs_tol must lie in (0, 1), got {abs_tol}")

    # For large x close via the reflection bound P(sup |W| > x) <= 2 exp(-x^2/2)
    # instead of summing thousands of near-unit terms.
    defect = 2.0 * math.exp(-0.5 * x * x)
    if defect <= abs_tol:
        return BrownianCdfResult(1.0, 0, defect)

    q = _PI2_8 / (x * x)
    total = 0.0
    k = 0
    sign = 1.0
    while True:
        mag = _FOUR_OVER_PI * math.exp(-q * (2 * k + 1) ** 2) / (2 * k + 1)
        if k > 0 and mag <= abs_tol:
            break
        total += sign * mag
        sign = -sign
        k += 1
        if mag == 0.0:
            break  # deep tail underflowed; later terms are smaller still
    value = min(1.0, max(0.0, total))
    # mag is the first omitted magnitude; floor at the subnormal minimum so the
    # certificate stays a true upper bound even past underflow.
    return BrownianCdfResult(value, k, max(mag, 5e-324))


def sup_cdf_asymptotic(x: float) -> float:
    """Leading-order form (4/pi) exp(-pi^2/(8 x^2)).

    Equivalent to the exact CDF as x -> 0; exceeds 1 for large x, so it is
    an asymptotic expression rather than a distribution function.
    """
    if not (x > 0.0) or math.isnan(x):
        raise DomainError(f"sup_cdf_asymptotic requires x > 0, got {x}")
    return _FOUR_OVER_PI * math.exp(-_PI2_8 / (x * x))


def wiener_term_prob(n: int, eps: float, drift: DriftSpec,
                     abs_tol: float = 1e-12) -> BrownianCdfResult:
    """P(sup |W| <= sqrt(pi^2/(8 log n)) * (eps + a_n)) for one index n."""
    if n < 1:
        raise DomainError(f"index n must be >= 1, got {n}")
    scale = eps + drift.value_at(n)
    if scale <= 0.0:
        raise DomainError(f"eps + a_n(eps) must be positive, got {scale}")
    x = math.sqrt(_PI2_8 / log_ve(n)) * scale
    return sup_cdf(x, abs_tol)


def sup_cdf_values(x: np.ndarray, abs_tol: float = 1e-14,
                   with_error: bool = False):
    """Vectorized theta-series values (no per-call certificates) for positive x.

    Entries with nonpositive x evaluate to 0 (the sup-norm is a.s. positive),
    which is the convention the series and dichotomy engines rely on.  With
    ``with_error`` the per-element truncation bound (first omitted term, or
    the reflection-bound defect on the saturated branch) is returned too.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=float)
    err = np.zeros(x.shape, dtype=float)
    pos = x > 0.0
    if np.any(pos):
        xp = x[pos]
        vals = np.zeros(xp.shape, dtype=float)
        errs = np.zeros(xp.shape, dtype=float)
        # Unit fast path mirrors the scalar reflection-bound closure.
        defect = 2.0 * np.exp(-0.5 * xp * xp)
        unit = defect <= abs_tol
        vals[unit] = 1.0
        errs[unit] = defect[unit]
        live = ~unit
        if np.any(live):
            q = _PI2_8 / (xp[live] * xp[live])
            acc = np.zeros(q.shape, dtype=float)
            sign = 1.0
            k = 0
            while True:
                mag = _FOUR_OVER_PI * np.exp(-q * (2 * k + 1) ** 2) / (2 * k + 1)
                if k > 0 and not np.any(mag > abs_tol):
                    break
                acc += sign * mag
                sign = -sign
                k += 1
            vals[live] = np.clip(acc, 0.0, 1.0)
            errs[live] = mag
        out[pos] = vals
        err[pos] = errs
    if with_error:
        return out, err
    return out
