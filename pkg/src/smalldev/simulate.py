"""Monte Carlo estimation of stay-in-band probabilities plus exact oracles.

Sampling draws i.i.d. increments, tracks the running maximum of |partial
sums| in a single pass, and estimates P(M_n <= threshold) with a Wilson score
confidence interval.  Randomness is counter-based: sample index space is
split into fixed-size blocks and block b of a run with seed s draws from a
Philox generator keyed by (s, b).  Block outcomes therefore depend only on
(seed, block), never on the worker count: workers merely claim blocks, and
the merged success count is an exact integer sum.  Identical
(seed, samples, workers) inputs reproduce results bit for bit.

Two exact oracles anchor the statistics: a transfer-matrix dynamic program
for the +-sigma walk (absorbing states outside the band) and an iterated
trapezoidal convolution of the Gaussian kernel with absorbing barriers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtri

from .errors import DomainError
from .params import DriftSpec
from .scaling import phi

__all__ = [
    "IncrementLaw",
    "MCEstimate",
    "WalkMaxSample",
    "GridOracleResult",
    "ExponentPoint",
    "substream",
    "draw_increments",
    "sample_walk_max",
    "walk_max_samples",
    "estimate_small_dev",
    "wilson_interval",
    "rademacher_oracle",
    "gaussian_grid_oracle",
    "exponent_check",
]

LAW_KINDS = ("rademacher", "gaussian", "uniform_centered",
             "exponential_centered", "symmetric_pareto")

BLOCK_SAMPLES = 4096   # samples per RNG substream block
_CHUNK_STEPS = 2048    # increments drawn per block per pass
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class IncrementLaw:
    """An i.i.d. increment law, standardized analytically to mean 0 and
    standard deviation sigma.

    moment_eps declares the guaranteed finite absolute moment order
    2 + moment_eps.  For symmetric_pareto with tail index alpha only
    moments below alpha exist, so moment_eps must stay below alpha - 2;
    the other laws have all moments finite.
    """

    kind: str
    sigma: float = 1.0
    moment_eps: float = 0.0
    alpha: float = 2.5

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise DomainError(f"unknown increment law {self.kind!r}")
        if not (self.sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.kind == "symmetric_pareto" and not (self.alpha > 2.0):
            raise DomainError(f"pareto tail index must exceed 2, got {self.alpha}")
        if self.moment_eps == 0.0:
            default = min(0.45, 0.9 * (self.alpha - 2.0)) \
                if self.kind == "symmetric_pareto" else 1.0
            object.__setattr__(self, "moment_eps", default)
        if not (self.moment_eps > 0.0):
            raise DomainError(f"moment_eps must be positive, got {self.moment_eps}")
        if self.kind == "symmetric_pareto" and not (self.moment_eps < self.alpha - 2.0):
            raise DomainError(
                f"pareto with alpha={self.alpha} only guarantees moments below "
                f"{self.alpha - 2.0}, got moment_eps={self.moment_eps}")


@dataclass(frozen=True)
class WalkMaxSample:
    """One realization of max_{k<=n} |S_k|."""

    m_n: float
    n: int


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo probability with Wilson confidence interval.

    For zero successes the interval degenerates to the one-sided Wilson
    upper bound and the estimate is flagged.
    """

    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float
    samples: int
    seed: int
    workers: int
    successes: int

    @property
    def flagged_zero(self) -> bool:
        return self.successes == 0


@dataclass(frozen=True)
class GridOracleResult:
    value: float
    error_estimate: float
    grid_points: int


@dataclass(frozen=True)
class ExponentPoint:
    """One row of an exponent table: p = P(M_n <= x sigma phi(n)) and the
    empirical decay exponent -log p / log n."""

    n: int
    p: float
    exponent: float
    lower_bound_only: bool = False


def substream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for (seed, index); streams never overlap."""
    key = (int(seed) % 2 ** 64) + ((int(index) % 2 ** 64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_unit(law: IncrementLaw, g: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance, zero-mean increments of the given law.

    Each law consumes draws element by element in a single pass, so a longer
    request shares its prefix with a shorter one on the same stream.
    """
    if law.kind == "rademacher":
        return g.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    if law.kind == "gaussian":
        return g.standard_normal(shape)
    if law.kind == "uniform_centered":
        return g.uniform(-_SQRT3, _SQRT3, shape)
    if law.kind == "exponential_centered":
        return g.standard_exponential(shape) - 1.0
    # symmetric_pareto: one uniform per element encodes both the sign and,
    # through inversion, a classic Pareto(alpha, 1) magnitude; rescaling by
    # sqrt((alpha-2)/alpha) makes the variance exactly 1.
    u = g.random(shape)
    sign = np.where(u >= 0.5, 1.0, -1.0)
    w = np.minimum(np.abs(2.0 * u - 1.0), 1.0 - 2.0 ** -53)
    mag = (1.0 - w) ** (-1.0 / law.alpha)
    return sign * mag * math.sqrt((law.alpha - 2.0) / law.alpha)


def draw_increments(law: IncrementLaw, count: int, seed: int) -> np.ndarray:
    """`count` i.i.d. increments on the real scale (mean 0, sd law.sigma)."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return law.sigma * _draw_unit(law, substream(seed, 0), (count,))


def _block_walk_max(law: IncrementLaw, n: int, rows: int,
                    g: np.random.Generator) -> np.ndarray:
    """Unit-scale running max of |partial sums| for `rows` independent walks."""
    carry = np.zeros(rows)
    m = np.zeros(rows)
    done = 0
    while done < n:
        c = min(_CHUNK_STEPS, n - done)
        a = _draw_unit(law, g, (rows, c))
        np.cumsum(a, axis=1, out=a)
        a += carry[:, None]
        carry = a[:, -1].copy()
        np.abs(a, out=a)
        m = np.maximum(m, a.max(axis=1))
        done += c
    return m


def sample_walk_max(law: IncrementLaw, n: int,
                    stream: np.random.Generator) -> WalkMaxSample:
    """Draw one path of n increments and return max_{k<=n} |S_k|.

    Single pass, constant memory; `stream` is consumed (obtain one via
    substream(seed, index)).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    carry = 0.0
    m = 0.0
    done = 0
    while done < n:
        c = min(_CHUNK_STEPS, n - done)
        a = _draw_unit(law, stream, (c,))
        np.cumsum(a, out=a)
        a += carry
        carry = float(a[-1])
        m = max(m, float(np.max(np.abs(a))))
        done += c
    return WalkMaxSample(m_n=law.sigma * m, n=n)


def _block_indices(samples: int):
    n_blocks = (samples + BLOCK_SAMPLES - 1) // BLOCK_SAMPLES
    for b in range(n_blocks):
        rows = min(BLOCK_SAMPLES, samples - b * BLOCK_SAMPLES)
        yield b, rows


def walk_max_samples(law: IncrementLaw, n: int, samples: int, seed: int,
                     workers: int = 1) -> np.ndarray:
    """Array of `samples` independent M_n draws (real scale), in sample order."""
    if n < 1 or samples < 1:
        raise DomainError("n and samples must be >= 1")
    blocks = list(_block_indices(samples))

    def run(item):
        b, rows = item
        return _block_walk_max(law, n, rows, substream(seed, b))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(item) for item in blocks]
    return law.sigma * np.concatenate(parts)


def wilson_interval(successes: int, samples: int, confidence: float):
    """Wilson score interval for a binomial proportion."""
    if samples < 1:
        raise DomainError("samples must be >= 1")
    if not (0.0 < confidence < 1.0):
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    if not (0 <= successes <= samples):
        raise DomainError("successes must lie in [0, samples]")
    if successes == 0:
        # One-sided Wilson upper bound; the two-sided interval is degenerate.
        z = ndtri(confidence)
        return 0.0, z * z / (samples + z * z)
    z = ndtri(0.5 * (1.0 + confidence))
    n = float(samples)
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    # The Wilson interval always contains p; guard the endpoints against the
    # one-ulp rounding that could violate that at p = 0 or 1.
    lo = min(max(0.0, center - half), p)
    hi = max(min(1.0, center + half), p)
    return lo, hi


def estimate_small_dev(law: IncrementLaw, n: int, eps: float, drift: DriftSpec,
                       samples: int, seed: int, workers: int = 1,
                       confidence: float = 0.95) -> MCEstimate:
    """Monte Carlo estimate of P(M_n <= sigma * phi(n) * (eps + a_n)).

    Deterministic in (law, n, eps, drift, samples, seed, confidence):
    workers only partition the block list.  The comparison happens on the
    unit scale (threshold / sigma), so rescaling sigma leaves every sample's
    indicator unchanged bit for bit.
    """
    if samples < 100:
        raise DomainError(f"samples must be >= 100, got {samples}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    unit_threshold = phi(n) * (eps + drift.value_at(n))
    if not (unit_threshold > 0.0):
        raise DomainError("threshold sigma*phi(n)*(eps + a_n) must be positive")

    blocks = list(_block_indices(samples))

    def run(item):
        b, rows = item
        m = _block_walk_max(law, n, rows, substream(seed, b))
        return int(np.count_nonzero(m <= unit_threshold))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, blocks))
    else:
        counts = [run(item) for item in blocks]
    successes = sum(counts)
    lo, hi = wilson_interval(successes, samples, confidence)
    return MCEstimate(
        p_hat=successes / samples,
        ci_low=lo,
        ci_high=hi,
        confidence=confidence,
        samples=samples,
        seed=int(seed),
        workers=workers,
        successes=successes,
    )


def rademacher_oracle(n: int, x: float, sigma: float = 1.0) -> float:
    """Exact P(max_{k<=n} |S_k| <= x) for the +-sigma walk.

    Transfer-matrix dynamic program over lattice states {-B, ..., B} with
    B = floor(x/sigma) and absorbing exterior; O(n*B) time, exact up to
    floating accumulation.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if not (sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma}")
    band = int(math.floor(x / sigma))
    if band == 0:
        return 0.0  # the first step already exits
    if band >= n:
        return 1.0  # the band is unreachable in n steps
    p = np.zeros(2 * band + 1)
    p[band] = 1.0
    q = np.empty_like(p)
    for _ in range(n):
        q[:] = 0.0
        q[:-1] += 0.5 * p[1:]
        q[1:] += 0.5 * p[:-1]
        p, q = q, p
    return float(np.sum(p))


def _grid_value(n: int, x: float, m: int) -> float:
    """Stay probability by iterated trapezoidal convolution on [-x, x]."""
    u = np.linspace(-x, x, m)
    h = u[1] - u[0]
    w = np.full(m, h)
    w[0] = w[-1] = 0.5 * h
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    f = norm * np.exp(-0.5 * u * u)          # density of S_1 on the band
    if n > 1:
        kernel = norm * np.exp(-0.5 * (u[:, None] - u[None, :]) ** 2) * w[None, :]
        for _ in range(n - 1):
            f = kernel @ f
    return float(np.dot(w, f))


def gaussian_grid_oracle(n: int, x: float, grid_points: int = 512) -> GridOracleResult:
    """Numerical P(max_{k<=n} |S_k| <= x) for standard Gaussian increments.

    Richardson-style error estimate from a half-resolution run (trapezoid
    error is O(h^2), so |full - half| / 3 estimates the full-grid error).
    Desk scale only: n <= 10^4.
    """
    if n < 1 or n > 10_000:
        raise DomainError(f"n must lie in [1, 10^4], got {n}")
    if not (x > 0.0):
        raise DomainError(f"x must be positive, got {x}")
    if grid_points < 256:
        raise DomainError(f"grid_points must be >= 256, got {grid_points}")
    full = _grid_value(n, x, grid_points)
    half = _grid_value(n, x, grid_points // 2)
    return GridOracleResult(
        value=full,
        error_estimate=abs(full - half) / 3.0,
        grid_points=grid_points,
    )


def exponent_check(law: IncrementLaw, x: float, n_schedule: Sequence[int],
                   method: str = "oracle", *, samples: int = 100_000,
                   seed: Optional[int] = None, workers: int = 1,
                   confidence: float = 0.95,
                   grid_points: int = 1024) -> list:
    """Empirical decay exponent -log P(M_n <= x sigma phi(n)) / log n per n.

    The exponent tends to 1/x^2.  `method` selects the probability source:
    "oracle" uses the exact dynamic program (rademacher) or the grid
    convolution (gaussian); "mc" uses Monte Carlo and needs a seed.  A Monte
    Carlo run with zero successes yields only a lower bound on the exponent,
    computed from the Wilson upper limit and flagged.
    """
    if not (x > 0.0):
        raise DomainError(f"x must be positive, got {x}")
    ns = [int(v) for v in n_schedule]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("n_schedule must be a nonempty increasing sequence")
    if method not in ("oracle", "mc"):
        raise DomainError(f"method must be 'oracle' or 'mc', got {method!r}")

    rows = []
    for n in ns:
        log_n = math.log(max(n, math.e))
        if method == "oracle":
            if law.kind == "rademacher":
                p = rademacher_oracle(n, x * law.sigma * phi(n), law.sigma)
            elif law.kind == "gaussian":
                p = gaussian_grid_oracle(n, x * phi(n), grid_points).value
            else:
                raise DomainError(f"no exact oracle for law {law.kind!r}")
            exponent = -math.log(p) / log_n if p > 0.0 else math.inf
            rows.append(ExponentPoint(n=n, p=p, exponent=exponent))
        else:
            if seed is None:
                raise DomainError("Monte Carlo exponent check requires a seed")
            est = estimate_small_dev(law, n, x, DriftSpec.zero(), samples,
                                     seed, workers, confidence)
            if est.successes == 0:
                rows.append(ExponentPoint(
                    n=n, p=est.ci_high,
                    exponent=-math.log(est.ci_high) / log_n,
                    lower_bound_only=True))
            else:
                rows.append(ExponentPoint(
                    n=n, p=est.p_hat, exponent=-math.log(est.p_hat) / log_n))
    return rows
