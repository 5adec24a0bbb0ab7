"""HTTP service wrapping the library for multi-client use.

Every endpoint is a thin POST wrapper over one library operation, with
pydantic request/response models.  Domain violations map to 400, the
divergent-series rejection to 409; request-shape problems are FastAPI's
usual 422.  All computations are pure functions of the request, so the
service needs no state and responses are reproducible.

Run with ``smalldev serve`` or ``uvicorn smalldev.service:app``.
"""

from typing import List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .brownian import sup_cdf
from .dichotomy import PsiSpec, classify_psi, partial_sum_diagnostic
from .errors import DivergentSeriesError, DomainError
from .params import DriftSpec, WeightParams
from .scaling import phi
from .series import eps_for_lambda, limit_constant, limit_probe, weighted_series_wiener
from .simulate import (IncrementLaw, estimate_small_dev, gaussian_grid_oracle,
                       rademacher_oracle)

app = FastAPI(
    title="smalldev",
    version=__version__,
    description="Small-deviation probabilities of random-walk maxima: exact "
                "Brownian band CDF, weighted series with tail acceleration, "
                "convergence dichotomy, reproducible Monte Carlo.",
)


@app.exception_handler(DivergentSeriesError)
async def _divergent_handler(request: Request, exc: DivergentSeriesError):
    return JSONResponse(status_code=409, content={"detail": str(exc)})


@app.exception_handler(DomainError)
async def _domain_handler(request: Request, exc: DomainError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


class BrownianCdfRequest(BaseModel):
    x: float
    abs_tol: float = 1e-12


class BrownianCdfResponse(BaseModel):
    value: float
    k_terms: int
    error_bound: float


class SeriesRequest(BaseModel):
    r: float
    a: float = 0.0
    tau: float = 0.0
    lam: Optional[float] = Field(
        default=None, description="normalization gap eps^-2 - (r-1)")
    eps: Optional[float] = Field(
        default=None, description="threshold scale; rejected if supercritical")
    rel_tol: float = 1e-6


class SeriesResponse(BaseModel):
    partial_sum: float
    tail_correction: float
    total: float
    normalized: float
    lam: float
    cutoff_N: int
    rel_err_bound: float
    analytic_limit: float


class LimitProbeRequest(BaseModel):
    r: float
    a: float = 0.0
    tau: float = 0.0
    lambdas: List[float]
    rel_tol: float = 1e-6
    agree_tol: Optional[float] = None


class LimitProbeRow(BaseModel):
    lam: float
    normalized: float


class LimitProbeResponse(BaseModel):
    rows: List[LimitProbeRow]
    extrapolated: float
    analytic: float
    agrees: Optional[bool]
    extrapolation_model: str


class SimulateRequest(BaseModel):
    law: str
    n: int
    eps: float
    tau: float = 0.0
    sigma: float = 1.0
    samples: int
    seed: int
    workers: int = 1
    confidence: float = 0.95


class SimulateResponse(BaseModel):
    threshold: float
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float
    samples: int
    seed: int
    workers: int
    successes: int
    flagged_zero: bool


class DichotomyRequest(BaseModel):
    c: float
    b: float = 0.0
    d: float = 0.0
    r: float
    a: float = 0.0
    n_max: int = 100_000
    mode: str = "exponential"


class DichotomyResponse(BaseModel):
    verdict: str
    mode: str
    cutoffs: List[int]
    partial_sums: List[float]


class RademacherOracleRequest(BaseModel):
    n: int
    x: float
    sigma: float = 1.0


class GaussianOracleRequest(BaseModel):
    n: int
    x: float
    grid_points: int = 512


class OracleResponse(BaseModel):
    value: float
    error_estimate: Optional[float] = None
    grid_points: Optional[int] = None


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/brownian/sup-cdf", response_model=BrownianCdfResponse)
def brownian_sup_cdf(req: BrownianCdfRequest):
    res = sup_cdf(req.x, req.abs_tol)
    return BrownianCdfResponse(value=res.value, k_terms=res.k_terms,
                               error_bound=res.error_bound)


@app.post("/series/weighted", response_model=SeriesResponse)
def series_weighted(req: SeriesRequest):
    params = WeightParams(req.r, req.a)
    drift = DriftSpec.canonical(req.tau)
    if (req.lam is None) == (req.eps is None):
        raise DomainError("provide exactly one of lam or eps")
    eps = req.eps if req.eps is not None else eps_for_lambda(params, req.lam)
    res = weighted_series_wiener(params, eps, drift, req.rel_tol)
    return SeriesResponse(
        partial_sum=res.partial_sum,
        tail_correction=res.tail_correction,
        total=res.total,
        normalized=res.normalized,
        lam=res.lam,
        cutoff_N=res.cutoff_N,
        rel_err_bound=res.rel_err_bound,
        analytic_limit=limit_constant(params, req.tau),
    )


@app.post("/series/limit-probe", response_model=LimitProbeResponse)
def series_limit_probe(req: LimitProbeRequest):
    params = WeightParams(req.r, req.a)
    res = limit_probe(params, DriftSpec.canonical(req.tau), req.lambdas,
                      req.rel_tol, req.agree_tol)
    return LimitProbeResponse(
        rows=[LimitProbeRow(lam=l, normalized=v)
              for l, v in zip(res.lambdas, res.normalized_values)],
        extrapolated=res.extrapolated,
        analytic=res.analytic,
        agrees=res.agrees,
        extrapolation_model=res.extrapolation_model,
    )


@app.post("/simulate/estimate", response_model=SimulateResponse)
def simulate_estimate(req: SimulateRequest):
    law = IncrementLaw(req.law, sigma=req.sigma)
    drift = DriftSpec.canonical(req.tau)
    est = estimate_small_dev(law, req.n, req.eps, drift, req.samples,
                             req.seed, req.workers, req.confidence)
    return SimulateResponse(
        threshold=req.sigma * phi(req.n) * (req.eps + drift.value_at(req.n)),
        p_hat=est.p_hat,
        ci_low=est.ci_low,
        ci_high=est.ci_high,
        confidence=est.confidence,
        samples=est.samples,
        seed=est.seed,
        workers=est.workers,
        successes=est.successes,
        flagged_zero=est.flagged_zero,
    )


@app.post("/dichotomy/classify", response_model=DichotomyResponse)
def dichotomy_classify(req: DichotomyRequest):
    psi = PsiSpec(req.c, req.b, req.d)
    params = WeightParams(req.r, req.a)
    verdict = classify_psi(psi, params)
    table = partial_sum_diagnostic(psi, params, req.n_max, req.mode)
    return DichotomyResponse(
        verdict=verdict.value,
        mode=table.mode,
        cutoffs=list(table.cutoffs),
        partial_sums=list(table.partial_sums),
    )


@app.post("/oracle/rademacher", response_model=OracleResponse)
def oracle_rademacher(req: RademacherOracleRequest):
    return OracleResponse(value=rademacher_oracle(req.n, req.x, req.sigma))


@app.post("/oracle/gaussian-grid", response_model=OracleResponse)
def oracle_gaussian_grid(req: GaussianOracleRequest):
    res = gaussian_grid_oracle(req.n, req.x, req.grid_points)
    return OracleResponse(value=res.value, error_estimate=res.error_estimate,
                          grid_points=res.grid_points)
