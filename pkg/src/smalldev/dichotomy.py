"""Convergence dichotomy for boundary functions psi.

For psi(n) = c log n + b log log n + d the weighted series

    sum n^(r-2) (log n)^a exp(-psi(n))
      = e^-d * sum n^(r-2-c) (log n)^(a-b)

is decidable by the iterated-logarithm integral test: it converges iff
c > r-1, or c = r-1 and b - a > 1.  The probability-weighted companion
series (with exp(-psi) replaced by the stay probability of a Brownian path
in the band sqrt(pi^2/(8 psi(n)))) converges or diverges together with it;
partial_sum_diagnostic tabulates both so the plateau/growth character can
be inspected side by side.

Classification is restricted to this three-parameter family because
convergence of a black-box psi is not finitely decidable; for tabulated psi
the diagnostics sum the initial terms exactly as given and render no
verdict.
"""

import enum
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .brownian import sup_cdf_values
from .errors import DomainError
from .params import WeightParams
from .scaling import log_ve, loglog_ve

__all__ = ["PsiSpec", "Verdict", "DiagnosticTable", "classify_psi",
           "partial_sum_diagnostic"]

_PI2_8 = math.pi ** 2 / 8.0
_CHUNK = 1_000_000


class Verdict(enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"


@dataclass(frozen=True)
class PsiSpec:
    """psi(n) = c*log n + b*log log n + d, eventually non-decreasing and
    positive; that holds for c > 0, or for c = 0 with b >= 0 and d > 0."""

    c: float
    b: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        ok = self.c > 0.0 or (self.c == 0.0 and self.b >= 0.0 and self.d > 0.0)
        if not ok:
            raise DomainError(
                "psi must be eventually non-decreasing and positive: "
                "need c > 0, or c = 0 with b >= 0 and d > 0")

    def value_at(self, n):
        return self.c * log_ve(n) + self.b * loglog_ve(n) + self.d


@dataclass(frozen=True)
class DiagnosticTable:
    """Partial sums of one summand mode at geometrically spaced cutoffs."""

    mode: str
    cutoffs: tuple
    partial_sums: tuple

    def increments(self) -> List[float]:
        prev = 0.0
        out = []
        for s in self.partial_sums:
            out.append(s - prev)
            prev = s
        return out


def classify_psi(psi: PsiSpec, params: WeightParams) -> Verdict:
    """Convergence verdict for sum n^(r-2) (log n)^a exp(-psi(n)).

    The constant offset d never matters (it scales the series by e^-d).
    The borderline c = r-1, b-a = 1 diverges, matching the integral test
    for sum 1/(n log n).
    """
    c_gap = psi.c - (params.r - 1.0)
    if c_gap > 0.0:
        return Verdict.CONVERGES
    if c_gap == 0.0 and (psi.b - params.a) > 1.0:
        return Verdict.CONVERGES
    return Verdict.DIVERGES


def _cutoffs(n_max: int) -> List[int]:
    cuts = []
    c = 10
    while c <= n_max:
        cuts.append(c)
        c *= 10
    if not cuts or cuts[-1] != n_max:
        cuts.append(n_max)
    return cuts


def partial_sum_diagnostic(psi, params: WeightParams, n_max: int,
                           mode: str = "exponential") -> DiagnosticTable:
    """Partial sums at cutoffs 10, 10^2, ..., n_max.

    mode "exponential" sums n^(r-2) (log n)^a exp(-psi(n)); mode
    "wiener_prob" replaces exp(-psi(n)) by the exact stay probability at
    band width sqrt(pi^2/(8 psi(n))).  Indices where psi(n) <= 0 take stay
    probability 1 (the band is unbounded in the limit psi -> 0+).

    `psi` is either a PsiSpec or a sequence of at least n_max tabulated
    values psi(1), psi(2), ...; tabulated boundaries get no convergence
    verdict (that is not finitely decidable) and their initial terms are
    summed exactly as given.
    """
    if n_max < 10:
        raise DomainError(f"n_max must be >= 10, got {n_max}")
    if mode not in ("exponential", "wiener_prob"):
        raise DomainError(f"unknown diagnostic mode {mode!r}")
    tabulated = None
    if not isinstance(psi, PsiSpec):
        tabulated = np.asarray(psi, dtype=float)
        if tabulated.ndim != 1 or tabulated.shape[0] < n_max:
            raise DomainError(
                f"tabulated psi must supply at least n_max = {n_max} values")
    r, a = params.r, params.a
    cuts = _cutoffs(n_max)
    sums = []
    running = 0.0
    cut_iter = iter(cuts)
    next_cut = next(cut_iter)
    for start in range(1, n_max + 1, _CHUNK):
        stop = min(start + _CHUNK - 1, n_max)
        n = np.arange(start, stop + 1, dtype=float)
        ln = log_ve(n)
        w = n ** (r - 2.0) * ln ** a
        pv = psi.value_at(n) if tabulated is None else tabulated[start - 1:stop]
        if mode == "exponential":
            term = w * np.exp(-pv)
        else:
            x = np.where(pv > 0.0, np.sqrt(_PI2_8 / np.maximum(pv, 1e-300)), np.inf)
            probs = np.ones_like(pv)
            finite = np.isfinite(x)
            probs[finite] = sup_cdf_values(x[finite])
            term = w * probs
        csum = np.cumsum(term)
        while next_cut is not None and next_cut <= stop:
            sums.append(running + float(csum[next_cut - start]))
            next_cut = next(cut_iter, None)
        running += float(csum[-1])
    return DiagnosticTable(mode=mode, cutoffs=tuple(cuts), partial_sums=tuple(sums))
