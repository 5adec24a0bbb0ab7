"""Weighted series of Wiener small-deviation probabilities and its limit.

The object of interest is

    S(eps) = sum_{n>=1} n^(r-2) (log n)^a P(sup|W| <= sqrt(pi^2/(8 log n)) (eps + a_n))

for subcritical eps < 1/sqrt(r-1).  Normalized by lam^(a+1) with
lam = eps^-2 - (r-1), it tends to (4/pi) exp(2 tau (r-1)^(3/2)) Gamma(a+1)
as lam -> 0.

Near the critical threshold the terms decay like n^(-1-lam), so direct
summation is hopeless.  The engine sums exact theta-series terms up to a
cutoff N and closes the remainder with midpoint Euler-Maclaurin integrals
in y = log x coordinates, one per theta index k (the k-sum is alternating
with decreasing pieces, so its truncation is certified too): for zero drift
the k-th piece reduces exactly to tail_integral(m_k*(r-1+lam) - (r-1), a,
log(N+1/2)) with m_k = (2k+1)^2; with drift the integrand keeps the exact
exponent m_k*y/(eps + tau/y)^2 - (r-1)y and is evaluated by adaptive
quadrature.  Every approximation step contributes a computable term to
rel_err_bound.

Sums use numpy's pairwise reduction over a fixed index order, so results are
deterministic and safe to produce concurrently.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .brownian import sup_cdf_values
from .errors import DivergentSeriesError, DomainError
from .params import DriftSpec, WeightParams
from .scaling import log_ve
from .specfun import gamma_fn, tail_integral

__all__ = [
    "SeriesResult",
    "LimitProbeResult",
    "critical_threshold",
    "limit_constant",
    "weighted_series_wiener",
    "limit_probe",
    "eps_for_lambda",
]

_FOUR_OVER_PI = 4.0 / math.pi
_PI2_8 = math.pi ** 2 / 8.0
_CHUNK = 500_000
_THETA_TOL = 1e-18  # per-term absolute truncation for the exact prefix


@dataclass(frozen=True)
class SeriesResult:
    """Weighted series value with its normalization and error accounting.

    total = partial_sum + tail_correction and normalized = lam^(a+1) * total
    hold exactly as computed; rel_err_bound budgets theta truncation, the
    asymptotic-form replacement in the tail, the Euler-Maclaurin closure and
    quadrature error.
    """

    partial_sum: float
    tail_correction: float
    total: float
    normalized: float
    lam: float
    cutoff_N: int
    rel_err_bound: float


@dataclass(frozen=True)
class LimitProbeResult:
    """Normalized series values along a lambda schedule plus their limit estimate."""

    lambdas: tuple
    normalized_values: tuple
    extrapolated: float
    analytic: float
    agrees: Optional[bool]
    agree_tol: Optional[float]
    extrapolation_model: str = "polynomial in lambda (leading error assumed first order)"


def critical_threshold(params: WeightParams, sigma: float = 1.0,
                       scaling: str = "phi") -> float:
    """Convergence/divergence threshold for eps under the chosen scaling.

    Under the phi(n) band (threshold sigma*phi(n)*eps) sigma is absorbed and
    the critical value is 1/sqrt(r-1); under the raw sqrt(n/log n) band it is
    sigma*sqrt(pi^2/(8(r-1))).
    """
    if not (sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma}")
    if scaling == "phi":
        return 1.0 / math.sqrt(params.r - 1.0)
    if scaling == "sqrt_n_over_log_n":
        return sigma * math.sqrt(math.pi ** 2 / (8.0 * (params.r - 1.0)))
    raise DomainError(f"unknown scaling {scaling!r}")


def limit_constant(params: WeightParams, tau: float) -> float:
    """(4/pi) * exp(2 tau (r-1)^(3/2)) * Gamma(a+1)."""
    return _FOUR_OVER_PI * math.exp(2.0 * tau * (params.r - 1.0) ** 1.5) \
        * gamma_fn(params.a + 1.0)


def eps_for_lambda(params: WeightParams, lam: float) -> float:
    """The eps with eps^-2 - (r-1) = lam."""
    if not (lam > 0.0):
        raise DomainError(f"lambda must be positive, got {lam}")
    return 1.0 / math.sqrt(lam + params.r - 1.0)


def _exponent_slope(y, eps, tau, r):
    """d/dy of Lambda(y)."""
    return y * y * (eps * y + 3.0 * tau) / (eps * y + tau) ** 3 - (r - 1.0)


def _auto_cutoff(eps: float, tau: float, lam: float, rel_tol: float) -> int:
    """Prefix length keeping the Euler-Maclaurin closure comfortably below
    rel_tol (rechecked against the computed bound after the fact) and the
    tail boundary away from any drift-inflated early hump."""
    n_em = math.sqrt(lam * (1.0 + lam) * 10.0 / (24.0 * rel_tol))
    n_drift = math.exp(4.0 * abs(tau) / eps)
    n = int(math.ceil(max(2000.0, n_em, n_drift)))
    return min(n, 500_000)


def _exact_prefix(params: WeightParams, eps: float, drift: DriftSpec, n_max: int):
    """Sum of n^(r-2) (log n)^a P_n for n = 1..n_max, plus the accumulated
    weighted theta truncation bound."""
    r, a = params.r, params.a
    total = 0.0
    trunc_err = 0.0
    for start in range(1, n_max + 1, _CHUNK):
        stop = min(start + _CHUNK - 1, n_max)
        n = np.arange(start, stop + 1, dtype=float)
        ln = log_ve(n)
        w = n ** (r - 2.0) * ln ** a
        scale = eps + drift.value_at(n)
        x = np.sqrt(_PI2_8 / ln) * scale
        p, perr = sup_cdf_values(x, _THETA_TOL, with_error=True)
        total += float(np.sum(w * p))
        trunc_err += float(np.sum(w * perr))
    return total, trunc_err


def weighted_series_wiener(params: WeightParams, eps: float, drift: DriftSpec,
                           rel_tol: float = 1e-6,
                           cutoff: Optional[int] = None) -> SeriesResult:
    """Evaluate the weighted series at subcritical eps.

    Raises DivergentSeriesError for eps at or above the critical threshold
    (the series is infinite there).  `cutoff` overrides the automatic prefix
    length; the tail past the cutoff is always closed analytically.
    """
    if not (0.0 < rel_tol < 0.1):
        raise DomainError(f"rel_tol must lie in (0, 0.1), got {rel_tol}")
    if not (eps > 0.0) or math.isnan(eps):
        raise DomainError(f"eps must be positive, got {eps}")
    threshold = critical_threshold(params, 1.0, "phi")
    if eps >= threshold:
        raise DivergentSeriesError(
            f"series diverges for eps >= {threshold:.6g} (got eps = {eps:.6g})")
    r, a = params.r, params.a
    lam = eps ** -2.0 - (r - 1.0)
    tau = drift.tau if drift.form == "canonical" else 0.0

    n_cut = int(cutoff) if cutoff is not None else _auto_cutoff(eps, tau, lam, rel_tol)
    if n_cut < 100:
        raise DomainError(f"cutoff must be at least 100, got {n_cut}")
    if tau < 0.0 and math.log(n_cut) < 2.0 * abs(tau) / eps:
        n_cut = int(math.ceil(math.exp(2.0 * abs(tau) / eps))) + 1

    grow = 4 if cutoff is None else 1  # escalate only an automatic cutoff
    for _ in range(grow):
        result = _evaluate(params, eps, drift, lam, tau, n_cut)
        if result.rel_err_bound <= rel_tol or n_cut >= 8_000_000:
            break
        n_cut *= 4
    return result


def _tail_piece(r: float, a: float, eps: float, tau: float, lam: float,
                y0: float, m: int):
    """One theta component of the tail in y = log x coordinates:
    int_{y0}^inf y^a exp{(r-1)y - m y/(eps+tau/y)^2} dy, with its error."""
    if tau == 0.0:
        lam_m = m * (r - 1.0 + lam) - (r - 1.0)
        ti = tail_integral(lam_m, a, y0)
        return ti.value, ti.value * max(ti.rel_err_bound, 1e-12)
    # Factor out the integrand's boundary value so quadrature sees an O(1)
    # profile with exponential decay.
    l0 = m * y0 / (eps + tau / y0) ** 2 - (r - 1.0) * y0

    def profile(u):
        y = y0 + u
        return y ** a * math.exp(l0 - (m * y / (eps + tau / y) ** 2 - (r - 1.0) * y))

    val, abserr = quad(profile, 0.0, np.inf, epsabs=0.0, epsrel=1e-10, limit=400)
    return math.exp(-l0) * val, math.exp(-l0) * abserr


def _evaluate(params: WeightParams, eps: float, drift: DriftSpec,
              lam: float, tau: float, n_cut: int) -> SeriesResult:
    r, a = params.r, params.a
    partial, theta_err = _exact_prefix(params, eps, drift, n_cut)

    y0 = math.log(n_cut + 0.5)
    x_mid = n_cut + 0.5
    g0 = y0 / (eps + tau / y0) ** 2
    g_slope = _exponent_slope(y0, eps, tau, r) + (r - 1.0)  # d/dy of y/(eps+tau/y)^2

    # Tail closed per theta index: pieces alternate with strictly decreasing
    # magnitude, so the first omitted piece certifies the k-truncation.
    tail = 0.0
    quad_err = 0.0
    em_err = 0.0
    k = 0
    sign = 1.0
    while True:
        m = (2 * k + 1) ** 2
        coef = _FOUR_OVER_PI / (2 * k + 1)
        piece, perr = _tail_piece(r, a, eps, tau, lam, y0, m)
        piece *= coef
        quad_err += coef * perr
        # midpoint Euler-Maclaurin closure per component:
        # |error| <= |f'(x_mid)| / 24,  d/dx log f = [(r-2) + a/y - m g'(y)]/x
        f_mid = coef * x_mid ** (r - 2.0) * y0 ** a * math.exp(-m * g0)
        em_err += abs(f_mid * ((r - 2.0) + a / y0 - m * g_slope) / x_mid) / 24.0
        tail += sign * piece
        sign = -sign
        k += 1
        if piece <= 1e-16 * max(abs(tail), 1e-300) or k >= 16:
            break
    ktrunc_err = piece  # bounds the first omitted alternating piece

    total = partial + tail
    err_abs = theta_err + ktrunc_err + em_err + quad_err
    normalized = lam ** (a + 1.0) * total
    return SeriesResult(
        partial_sum=partial,
        tail_correction=tail,
        total=total,
        normalized=normalized,
        lam=lam,
        cutoff_N=n_cut,
        rel_err_bound=err_abs / total if total > 0.0 else math.inf,
    )


def _neville_to_zero(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Polynomial extrapolation of (xs, ys) to x = 0 (Neville's scheme)."""
    t = [float(v) for v in ys]
    n = len(t)
    for m in range(1, n):
        for i in range(n - m):
            t[i] = (xs[i + m] * t[i] - xs[i] * t[i + 1]) / (xs[i + m] - xs[i])
    return t[0]


def limit_probe(params: WeightParams, drift: DriftSpec,
                lambda_schedule: Sequence[float], rel_tol: float = 1e-6,
                agree_tol: Optional[float] = None) -> LimitProbeResult:
    """Evaluate the normalized series along a decreasing lambda schedule and
    extrapolate it to lambda = 0.

    The extrapolation is polynomial in lambda (Richardson/Neville with a
    first-order leading error assumed); both raw and extrapolated values are
    reported so the assumption stays inspectable.  If agree_tol is given, the
    result records whether the extrapolated value matches the analytic limit
    constant to that relative tolerance.
    """
    lams = [float(v) for v in lambda_schedule]
    if not lams:
        raise DomainError("lambda schedule must not be empty")
    if any(not (v > 0.0) for v in lams):
        raise DomainError("lambda schedule entries must be positive")
    if any(b >= a for a, b in zip(lams, lams[1:])):
        raise DomainError("lambda schedule must be strictly decreasing")

    values = []
    for lam in lams:
        res = weighted_series_wiener(params, eps_for_lambda(params, lam), drift, rel_tol)
        values.append(res.normalized)
    extrapolated = _neville_to_zero(lams, values)
    analytic = limit_constant(params, drift.tau)
    agrees = None
    if agree_tol is not None:
        agrees = abs(extrapolated - analytic) <= agree_tol * analytic
    return LimitProbeResult(
        lambdas=tuple(lams),
        normalized_values=tuple(values),
        extrapolated=extrapolated,
        analytic=analytic,
        agrees=agrees,
        agree_tol=agree_tol,
    )
