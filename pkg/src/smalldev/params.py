"""Parameter types for the weighted series: exponent pair and threshold drift."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scaling import log_ve

__all__ = ["WeightParams", "DriftSpec"]


@dataclass(frozen=True)
class WeightParams:
    """Exponent pair (r, a) of the weight n^(r-2) (log n)^a.

    Requires r > 1 and a > -1; outside that range the normalized series has
    no finite positive limit.
    """

    r: float
    a: float = 0.0

    def __post_init__(self):
        if not (self.r > 1.0):
            raise DomainError(f"weight exponent r must exceed 1, got {self.r}")
        if not (self.a > -1.0):
            raise DomainError(f"log-weight exponent a must exceed -1, got {self.a}")


@dataclass(frozen=True)
class DriftSpec:
    """Threshold drift sequence a_n with a_n * log n -> tau.

    Two forms:
      * "canonical": a_n = tau / log n (the product is exactly tau for every n)
      * "zero":      a_n = 0 identically (requires tau = 0)
    """

    tau: float = 0.0
    form: str = "canonical"

    def __post_init__(self):
        if self.form not in ("canonical", "zero"):
            raise DomainError(f"unknown drift form {self.form!r}")
        if self.form == "zero" and self.tau != 0.0:
            raise DomainError("zero drift form requires tau = 0")

    @classmethod
    def zero(cls) -> "DriftSpec":
        return cls(0.0, "zero")

    @classmethod
    def canonical(cls, tau: float) -> "DriftSpec":
        return cls(tau, "canonical")

    def value_at(self, n):
        """a_n; accepts a scalar index or an array of indices."""
        if self.form == "zero":
            return np.zeros_like(n, dtype=float) if isinstance(n, np.ndarray) else 0.0
        return self.tau / log_ve(n)
