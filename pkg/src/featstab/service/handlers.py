"""Request handlers: payload conversion plus calls into the core package.

Handlers are plain functions from request models to response models so the
FastAPI endpoints and the CLI's in-process mode share one code path.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..core import (
    FeatureSet,
    FeatureUniverse,
    SelectionEnsemble,
    SimilarityMatrix,
    StabilityConfig,
    validate_similarity_matrix,
)
from ..errors import ConflictingInputs, MissingSimilarityMatrix, NonSquare
from ..expectation import ExpectationCache
from ..experiments import (
    CorrelationMatrix,
    exhaustive_study,
    measure_correlations,
    runtime_benchmark,
)
from ..measures import MeasureKind, compute_measure
from ..similarity import DataMatrix, similarity_from_data
from . import schemas


def _universe(ids: list[str]) -> FeatureUniverse:
    return FeatureUniverse(tuple(ids))


def _rectangular(rows: list[list[float]], width: int, what: str) -> np.ndarray:
    for index, row in enumerate(rows):
        if len(row) != width:
            raise NonSquare(
                f"{what} row {index} has {len(row)} values, expected {width}"
            )
    return np.array(rows, dtype=float).reshape(len(rows), width)


def _similarity(payload: schemas.SimilarityPayload) -> SimilarityMatrix:
    universe = _universe(payload.ids)
    values = _rectangular(payload.values, universe.p, "similarity")
    return validate_similarity_matrix(values, universe)


def _data(payload: schemas.DataPayload) -> DataMatrix:
    universe = _universe(payload.ids)
    values = _rectangular(payload.rows, universe.p, "data")
    return DataMatrix(universe=universe, values=values)


def _ensemble(payload: schemas.EnsemblePayload) -> SelectionEnsemble:
    universe = _universe(payload.universe)
    return SelectionEnsemble(
        universe=universe, sets=tuple(FeatureSet.of(s) for s in payload.sets)
    )


def _measures(names: list[str]) -> list[MeasureKind]:
    return [MeasureKind.parse(name) for name in names]


def _resolve_similarity(
    similarity: Optional[schemas.SimilarityPayload],
    data: Optional[schemas.DataPayload],
    required: bool,
) -> Optional[SimilarityMatrix]:
    if similarity is not None and data is not None:
        raise ConflictingInputs("give a similarity matrix or a data matrix, not both")
    if similarity is not None:
        return _similarity(similarity)
    if data is not None:
        return similarity_from_data(_data(data))
    if required:
        raise MissingSimilarityMatrix(
            "an adjusted measure was requested but no similarity or data matrix given"
        )
    return None


def _config(payload: schemas.ConfigPayload) -> StabilityConfig:
    return StabilityConfig(
        theta=payload.theta,
        expectation_mode=payload.expectation,
        mc_samples=payload.mc_samples,
        rng_seed=payload.seed,
        exact_enumeration_cap=payload.enumeration_cap,
    )


def _similarity_payload(sim: SimilarityMatrix) -> schemas.SimilarityPayload:
    return schemas.SimilarityPayload(
        ids=list(sim.universe.ids),
        values=[[float(v) for v in row] for row in sim.values],
    )


def _correlation_payload(matrix: CorrelationMatrix) -> schemas.CorrelationPayload:
    return schemas.CorrelationPayload(
        measures=list(matrix.measures),
        values=[list(row) for row in matrix.values],
    )


def compute(request: schemas.ComputeRequest) -> schemas.ComputeResponse:
    measures = _measures(request.measures)
    ensemble = _ensemble(request.ensemble)
    needs_similarity = any(kind.needs_similarity for kind in measures)
    sim = _resolve_similarity(request.similarity, request.data, needs_similarity)
    config = _config(request.config)
    cache = ExpectationCache()
    results = []
    for kind in measures:
        result = compute_measure(kind, ensemble, sim, config, cache)
        results.append(
            schemas.MeasureRecord(
                measure=result.measure_name,
                value=result.value,
                n_undefined_pairs=result.n_undefined_pairs,
                expectation=config.expectation_mode,
                seed=config.rng_seed,
            )
        )
    return schemas.ComputeResponse(results=results)


def similarity(request: schemas.SimilarityRequest) -> schemas.SimilarityResponse:
    sim = similarity_from_data(_data(request.data))
    return schemas.SimilarityResponse(similarity=_similarity_payload(sim))


def exhaustive(request: schemas.ExhaustiveRequest) -> schemas.ExhaustiveResponse:
    sim = _similarity(request.similarity)
    report = exhaustive_study(sim, request.theta, _measures(request.measures))
    rows = [
        schemas.CombinationRecord(
            index=row.index,
            set_a=list(row.set_a),
            set_b=list(row.set_b),
            values=row.values,
        )
        for row in report.rows
    ]
    return schemas.ExhaustiveResponse(
        p=report.p,
        theta=report.theta,
        combinations=report.combinations,
        defined_combinations=report.defined_combinations,
        rows=rows,
        correlations=_correlation_payload(report.correlations),
    )


def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
    measures = _measures(request.measures)
    config = StabilityConfig(
        theta=request.theta,
        expectation_mode=request.expectation,
        mc_samples=request.mc_samples,
        rng_seed=request.seed,
        exact_enumeration_cap=request.enumeration_cap,
    )
    datasets = []
    for payload in request.datasets:
        sim = _resolve_similarity(payload.similarity, payload.data, required=True)
        ensembles = [
            SelectionEnsemble(
                universe=sim.universe,
                sets=tuple(FeatureSet.of(s) for s in sets),
            )
            for sets in payload.ensembles
        ]
        datasets.append((sim, ensembles))
    report = measure_correlations(datasets, config, measures)
    return schemas.CompareResponse(
        measures=list(report.measures),
        per_dataset=[_correlation_payload(m) for m in report.per_dataset],
        ensembles_used=list(report.ensembles_used),
        mean=_correlation_payload(report.mean),
    )


def bench(request: schemas.BenchRequest) -> schemas.BenchResponse:
    sim = _similarity(request.similarity)
    report = runtime_benchmark(
        sim,
        m=request.m,
        set_size=request.set_size,
        repetitions=request.repetitions,
        mc_samples=request.mc_samples,
        rng_seed=request.seed,
        theta=request.theta,
        measures=_measures(request.measures),
    )
    rows = [
        schemas.BenchRowPayload(
            measure=row.measure,
            median_seconds=row.median_seconds,
            value=row.value,
            n_undefined_pairs=row.n_undefined_pairs,
        )
        for row in report.rows
    ]
    return schemas.BenchResponse(
        p=report.p,
        m=report.m,
        set_size=report.set_size,
        repetitions=report.repetitions,
        mc_samples=report.mc_samples,
        seed=report.rng_seed,
        theta=report.theta,
        rows=rows,
    )
