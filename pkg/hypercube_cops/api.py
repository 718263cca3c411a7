"""HTTP surface: bound reports, exact solutions and Monte Carlo estimates."""

import logging
from functools import lru_cache
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from hypercube_cops.bounds import BoundReport, bound_report
from hypercube_cops.links import LinkedModel, UrlFor
from hypercube_cops.montecarlo import (
    EstimateResult,
    TrialConfig,
    estimate_win_probability,
)
from hypercube_cops.solver import SolveResult, cop_number_exact
from hypercube_cops.utils import BudgetExceeded, InvalidConfig

logger = logging.getLogger(__name__)

MAX_API_TRIALS = 100_000

app = FastAPI(title="hypercube-cops")


class BoundsResource(LinkedModel):
    n: int
    report: BoundReport

    href: UrlFor = UrlFor("read_bounds", {"n": "<n>"})
    solution: UrlFor = UrlFor("read_solution", {"n": "<n>"}, condition=lambda values: values["n"] <= 6)


class SolutionResource(LinkedModel):
    n: int
    result: SolveResult

    href: UrlFor = UrlFor("read_solution", {"n": "<n>"})
    bounds: UrlFor = UrlFor("read_bounds", {"n": "<n>"})


class EstimateResource(LinkedModel):
    n: int
    config: TrialConfig
    estimate: EstimateResult

    bounds: UrlFor = UrlFor("read_bounds", {"n": "<n>"})


@app.exception_handler(InvalidConfig)
async def invalid_config(_: Request, exc: InvalidConfig) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(BudgetExceeded)
async def budget_exceeded(_: Request, exc: BudgetExceeded) -> JSONResponse:
    return JSONResponse(status_code=503, content={"detail": str(exc)})


@lru_cache(maxsize=16)
def _solve(n: int, max_cops: Optional[int]) -> SolveResult:
    return cop_number_exact(n, max_cops)


@app.get("/bounds/{n}", response_model=BoundsResource)
def read_bounds(n: int, c: Optional[float] = None) -> Any:
    return BoundsResource(n=n, report=bound_report(n, c_override=c))


@app.get("/solutions/{n}", response_model=SolutionResource)
def read_solution(n: int, max_cops: Optional[int] = None) -> Any:
    return SolutionResource(n=n, result=_solve(n, max_cops))


@app.post("/estimates", response_model=EstimateResource)
def create_estimate(config: TrialConfig) -> Any:
    if config.trials > MAX_API_TRIALS:
        error_message = f"At most {MAX_API_TRIALS} trials per request, got {config.trials}"
        raise InvalidConfig(error_message)

    logger.info("Estimating n=%d C=%d over %d trials", config.n, config.cop_count, config.trials)
    return EstimateResource(
        n=config.n, config=config, estimate=estimate_win_probability(config)
    )


LinkedModel.init_app(app)
