"""Pydantic request/response models for the HTTP service.

These are the wire format; conversion to domain objects lives in handlers.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..measures import ALL_MEASURES

DEFAULT_MEASURES = [kind.value for kind in ALL_MEASURES]


class SimilarityPayload(BaseModel):
    ids: list[str]
    values: list[list[float]]


class DataPayload(BaseModel):
    ids: list[str]
    rows: list[list[float]]


class EnsemblePayload(BaseModel):
    universe: list[str]
    sets: list[list[str]]


class ConfigPayload(BaseModel):
    theta: float = 0.9
    expectation: Literal["exact", "monte_carlo"] = "exact"
    mc_samples: int = 10_000
    seed: Optional[int] = None
    enumeration_cap: int = 10_000_000


class MeasureRecord(BaseModel):
    measure: str
    value: Optional[float]
    n_undefined_pairs: int
    expectation: str
    seed: Optional[int]


class ComputeRequest(BaseModel):
    ensemble: EnsemblePayload
    similarity: Optional[SimilarityPayload] = None
    data: Optional[DataPayload] = None
    measures: list[str] = Field(default_factory=lambda: list(DEFAULT_MEASURES))
    config: ConfigPayload = Field(default_factory=ConfigPayload)


class ComputeResponse(BaseModel):
    results: list[MeasureRecord]


class SimilarityRequest(BaseModel):
    data: DataPayload


class SimilarityResponse(BaseModel):
    similarity: SimilarityPayload


class CombinationRecord(BaseModel):
    index: int
    set_a: list[str]
    set_b: list[str]
    values: dict[str, Optional[float]]


class CorrelationPayload(BaseModel):
    measures: list[str]
    values: list[list[Optional[float]]]


class ExhaustiveRequest(BaseModel):
    similarity: SimilarityPayload
    theta: float = 0.9
    measures: list[str] = Field(default_factory=lambda: list(DEFAULT_MEASURES))


class ExhaustiveResponse(BaseModel):
    p: int
    theta: float
    combinations: int
    defined_combinations: int
    rows: list[CombinationRecord]
    correlations: CorrelationPayload


class DatasetPayload(BaseModel):
    similarity: Optional[SimilarityPayload] = None
    data: Optional[DataPayload] = None
    ensembles: list[list[list[str]]]


class CompareRequest(BaseModel):
    datasets: list[DatasetPayload]
    theta: float = 0.9
    expectation: Literal["exact", "monte_carlo"] = "monte_carlo"
    mc_samples: int = 10_000
    seed: Optional[int] = None
    enumeration_cap: int = 10_000_000
    measures: list[str] = Field(default_factory=lambda: list(DEFAULT_MEASURES))


class CompareResponse(BaseModel):
    measures: list[str]
    per_dataset: list[CorrelationPayload]
    ensembles_used: list[int]
    mean: CorrelationPayload


class BenchRequest(BaseModel):
    similarity: SimilarityPayload
    m: int = 10
    set_size: int
    repetitions: int = 5
    mc_samples: int = 10_000
    seed: int
    theta: float = 0.9
    measures: list[str] = Field(default_factory=lambda: list(DEFAULT_MEASURES))


class BenchRowPayload(BaseModel):
    measure: str
    median_seconds: float
    value: Optional[float]
    n_undefined_pairs: int


class BenchResponse(BaseModel):
    p: int
    m: int
    set_size: int
    repetitions: int
    mc_samples: int
    seed: int
    theta: float
    rows: list[BenchRowPayload]


class ErrorResponse(BaseModel):
    error: str
    detail: str
