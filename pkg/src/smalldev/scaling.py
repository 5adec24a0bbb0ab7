"""Logarithm convention and band scaling used throughout the package.

Every logarithm of an index is floored at 1:  log x := ln(max(x, e)).  This
keeps weights and the band width phi finite and positive from n = 1 on, and
it is applied consistently at both logarithm levels (log log x floors the
inner log first, then the outer one).
"""

import math

import numpy as np

__all__ = ["log_ve", "loglog_ve", "phi"]


def log_ve(x):
    """ln(max(x, e)), elementwise for arrays."""
    if isinstance(x, np.ndarray):
        return np.log(np.maximum(x, math.e))
    return math.log(max(x, math.e))


def loglog_ve(x):
    """ln(max(ln(max(x, e)), e))."""
    return log_ve(log_ve(x))


def phi(x):
    """Band scale sqrt(pi^2 * x / (8 log x)); thresholds are sigma*phi(n)*(...)."""
    if isinstance(x, np.ndarray):
        if np.any(x <= 0):
            raise ValueError("phi requires positive x")
        return np.sqrt(math.pi ** 2 * x / (8.0 * log_ve(x)))
    if x <= 0:
        raise ValueError("phi requires positive x")
    return math.sqrt(math.pi ** 2 * x / (8.0 * log_ve(x)))
