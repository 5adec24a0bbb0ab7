"""Gamma function and the exponential-weighted tail integral.

tail_integral(lam, a, y0) = integral_{y0}^inf y^a exp(-lam y) dy
                          = lam^-(a+1) * Gamma(a+1) * Q(a+1, lam*y0),

where Q is the regularized upper incomplete gamma function.  Q is computed
with the classic split: a converging power series for lam*y0 below a+2 and
a modified Lentz continued fraction above, each iterated to ~1e-15 relative,
well inside the advertised 1e-8 bound.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["TailIntegralResult", "gamma_fn", "tail_integral", "regularized_gamma_q"]

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 10_000
_REL_ERR_BOUND = 1e-12


@dataclass(frozen=True)
class TailIntegralResult:
    value: float
    rel_err_bound: float


def gamma_fn(z: float) -> float:
    """Gamma(z) for z > 0."""
    if not (z > 0.0) or math.isnan(z):
        raise DomainError(f"gamma_fn requires z > 0, got {z}")
    return math.gamma(z)


def _gamma_p_series(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x) by power series (x < s+2)."""
    if x == 0.0:
        return 0.0
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise ArithmeticError("incomplete gamma series did not converge")


def _gamma_q_contfrac(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x) by Lentz continued fraction."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            exponent = -x + s * math.log(x) - math.lgamma(s)
            if exponent < -745.0:
                return 0.0
            return math.exp(exponent) * h
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def regularized_gamma_q(s: float, x: float) -> float:
    """Q(s, x) = Gamma(s, x)/Gamma(s) for s > 0, x >= 0."""
    if not (s > 0.0):
        raise DomainError(f"regularized_gamma_q requires s > 0, got {s}")
    if x < 0.0:
        raise DomainError(f"regularized_gamma_q requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0
    if x < s + 1.0:
        return 1.0 - _gamma_p_series(s, x)
    return _gamma_q_contfrac(s, x)


def tail_integral(lam: float, a: float, y0: float = 0.0) -> TailIntegralResult:
    """integral_{y0}^inf y^a exp(-lam y) dy for lam > 0, a > -1, y0 >= 0."""
    if not (lam > 0.0) or math.isnan(lam):
        raise DomainError(f"tail_integral requires lam > 0, got {lam}")
    if not (a > -1.0) or math.isnan(a):
        raise DomainError(f"tail_integral requires a > -1, got {a}")
    if y0 < 0.0:
        raise DomainError(f"tail_integral requires y0 >= 0, got {y0}")
    s = a + 1.0
    q = regularized_gamma_q(s, lam * y0)
    if q == 0.0:
        return TailIntegralResult(0.0, _REL_ERR_BOUND)
    log_value = math.lgamma(s) - s * math.log(lam) + math.log(q)
    return TailIntegralResult(math.exp(log_value), _REL_ERR_BOUND)
