"""FastAPI application exposing the stability measures over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import StabilityError
from . import handlers, schemas

app = FastAPI(
    title="featstab",
    version=__version__,
    description="Feature-selection stability measures with similarity adjustments.",
)


@app.exception_handler(StabilityError)
async def stability_error_handler(request: Request, exc: StabilityError):
    return JSONResponse(
        status_code=400,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.post(
    "/compute",
    response_model=schemas.ComputeResponse,
    responses={400: {"model": schemas.ErrorResponse}},
)
def compute(request: schemas.ComputeRequest) -> schemas.ComputeResponse:
    return handlers.compute(request)


@app.post(
    "/similarity",
    response_model=schemas.SimilarityResponse,
    responses={400: {"model": schemas.ErrorResponse}},
)
def similarity(request: schemas.SimilarityRequest) -> schemas.SimilarityResponse:
    return handlers.similarity(request)


@app.post(
    "/exhaustive",
    response_model=schemas.ExhaustiveResponse,
    responses={400: {"model": schemas.ErrorResponse}},
)
def exhaustive(request: schemas.ExhaustiveRequest) -> schemas.ExhaustiveResponse:
    return handlers.exhaustive(request)


@app.post(
    "/compare",
    response_model=schemas.CompareResponse,
    responses={400: {"model": schemas.ErrorResponse}},
)
def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
    return handlers.compare(request)


@app.post(
    "/bench",
    response_model=schemas.BenchResponse,
    responses={400: {"model": schemas.ErrorResponse}},
)
def bench(request: schemas.BenchRequest) -> schemas.BenchResponse:
    return handlers.bench(request)
