"""Built-in experiments: exhaustive small-universe study, cross-data-set
measure correlation, and a wall-clock benchmark of the measures."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    EXACT,
    MONTE_CARLO,
    FeatureSet,
    FeatureUniverse,
    SelectionEnsemble,
    SimilarityMatrix,
    StabilityConfig,
    validate_similarity_matrix,
)
from .errors import BadCardinality, InsufficientEnsembles, InvalidEnsemble, UniverseTooLarge
from .expectation import ExpectationCache, draw_subset
from .measures import ALL_MEASURES, MeasureKind, compute_measure, pairwise_score

#: Hard cap on the universe size of the exhaustive study (4^p combinations).
EXHAUSTIVE_MAX_P = 12

_BENCH_STREAM = 999_983
_SEED_MASK = (1 << 64) - 1


def demo_similarity_matrix() -> SimilarityMatrix:
    """Illustrative 7-feature similarity matrix with three blocks of mutually
    similar features (thresholded at 0.9). Hand-picked values, not derived
    from any data set."""
    ids = ("x1", "x2", "x3", "x4", "x5", "x6", "x7")
    values = np.array(
        [
            [1.00, 0.95, 0.92, 0.30, 0.25, 0.20, 0.21],
            [0.95, 1.00, 0.92, 0.28, 0.27, 0.22, 0.20],
            [0.92, 0.92, 1.00, 0.31, 0.26, 0.24, 0.23],
            [0.30, 0.28, 0.31, 1.00, 0.91, 0.35, 0.33],
            [0.25, 0.27, 0.26, 0.91, 1.00, 0.34, 0.32],
            [0.20, 0.22, 0.24, 0.35, 0.34, 1.00, 1.00],
            [0.21, 0.20, 0.23, 0.33, 0.32, 1.00, 1.00],
        ]
    )
    return validate_similarity_matrix(values, FeatureUniverse(ids))


@dataclass(frozen=True)
class CombinationRow:
    """Measure values of one ordered pair of subsets from the exhaustive study."""

    index: int
    set_a: tuple[str, ...]
    set_b: tuple[str, ...]
    values: dict[str, Optional[float]]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson correlations between measure value vectors; unit diagonal."""

    measures: tuple[str, ...]
    values: tuple[tuple[Optional[float], ...], ...]


@dataclass(frozen=True)
class ExhaustiveReport:
    p: int
    theta: float
    combinations: int
    defined_combinations: int
    rows: tuple[CombinationRow, ...]
    correlations: CorrelationMatrix


def _correlation_matrix(
    measures: Sequence[MeasureKind], columns: np.ndarray
) -> CorrelationMatrix:
    """Pearson correlations of the columns (one per measure); entries are None
    when a column is constant or fewer than two complete rows exist."""
    n_measures = len(measures)
    out: list[list[Optional[float]]] = [
        [None] * n_measures for _ in range(n_measures)
    ]
    for i in range(n_measures):
        out[i][i] = 1.0
    if columns.shape[0] >= 2:
        stds = columns.std(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.corrcoef(columns, rowvar=False)
        for i in range(n_measures):
            for j in range(i + 1, n_measures):
                if stds[i] > 0.0 and stds[j] > 0.0:
                    value = float(min(1.0, max(-1.0, corr[i, j])))
                    out[i][j] = value
                    out[j][i] = value
    return CorrelationMatrix(
        measures=tuple(k.value for k in measures),
        values=tuple(tuple(row) for row in out),
    )


def exhaustive_study(
    sim: SimilarityMatrix,
    theta: float = 0.9,
    measures: Sequence[MeasureKind] = ALL_MEASURES,
) -> ExhaustiveReport:
    """Score every ordered pair of subsets of the universe as an m=2 ensemble.

    All 2^p * 2^p combinations are evaluated with exact expectations.
    Correlations between measures are computed over the combinations where
    every requested measure is defined; combinations with undefined scores
    (e.g. empty selections) stay in the value table but not the correlations.
    """
    p = sim.universe.p
    if p > EXHAUSTIVE_MAX_P:
        raise UniverseTooLarge(
            f"exhaustive study is limited to p <= {EXHAUSTIVE_MAX_P}, got {p}"
        )
    config = StabilityConfig(theta=theta, expectation_mode=EXACT)
    cache = ExpectationCache()
    ids = sim.universe.ids
    subsets = [
        FeatureSet.of(ids[k] for k in range(p) if mask >> k & 1)
        for mask in range(1 << p)
    ]
    id_tuples = [
        tuple(ids[k] for k in range(p) if mask >> k & 1) for mask in range(1 << p)
    ]
    rows = []
    complete: list[list[float]] = []
    index = 0
    for mask_a in range(1 << p):
        set_a = subsets[mask_a]
        for mask_b in range(1 << p):
            set_b = subsets[mask_b]
            values: dict[str, Optional[float]] = {}
            for kind in measures:
                score = pairwise_score(kind, set_a, set_b, sim, config, cache, p)
                values[kind.value] = score.value
            rows.append(
                CombinationRow(
                    index=index,
                    set_a=id_tuples[mask_a],
                    set_b=id_tuples[mask_b],
                    values=values,
                )
            )
            if all(v is not None for v in values.values()):
                complete.append([values[k.value] for k in measures])
            index += 1
    columns = np.array(complete, dtype=float).reshape(len(complete), len(measures))
    return ExhaustiveReport(
        p=p,
        theta=theta,
        combinations=len(rows),
        defined_combinations=len(complete),
        rows=tuple(rows),
        correlations=_correlation_matrix(measures, columns),
    )


@dataclass(frozen=True)
class CompareReport:
    measures: tuple[str, ...]
    per_dataset: tuple[CorrelationMatrix, ...]
    ensembles_used: tuple[int, ...]
    mean: CorrelationMatrix


def measure_correlations(
    datasets: Sequence[tuple[SimilarityMatrix, Sequence[SelectionEnsemble]]],
    config: StabilityConfig,
    measures: Sequence[MeasureKind] = ALL_MEASURES,
) -> CompareReport:
    """Per data set, correlate the measures' values across its ensembles, then
    average the correlation matrices element-wise across data sets.

    Ensembles for which any requested measure is undefined are dropped from
    that data set; at least three usable ensembles are required per data set.
    """
    if not datasets:
        raise InsufficientEnsembles("need at least one data set")
    per_dataset = []
    used_counts = []
    for sim, ensembles in datasets:
        cache = ExpectationCache()
        vectors = []
        for ensemble in ensembles:
            values = [
                compute_measure(kind, ensemble, sim, config, cache).value
                for kind in measures
            ]
            if all(v is not None for v in values):
                vectors.append(values)
        if len(vectors) < 3:
            raise InsufficientEnsembles(
                f"need at least 3 ensembles with defined values per data set, "
                f"got {len(vectors)}"
            )
        used_counts.append(len(vectors))
        per_dataset.append(
            _correlation_matrix(measures, np.array(vectors, dtype=float))
        )
    n_measures = len(measures)
    mean_values: list[list[Optional[float]]] = []
    for i in range(n_measures):
        row: list[Optional[float]] = []
        for j in range(n_measures):
            entries = [
                matrix.values[i][j]
                for matrix in per_dataset
                if matrix.values[i][j] is not None
            ]
            row.append(math.fsum(entries) / len(entries) if entries else None)
        mean_values.append(row)
    mean = CorrelationMatrix(
        measures=tuple(k.value for k in measures),
        values=tuple(tuple(row) for row in mean_values),
    )
    return CompareReport(
        measures=tuple(k.value for k in measures),
        per_dataset=tuple(per_dataset),
        ensembles_used=tuple(used_counts),
        mean=mean,
    )


@dataclass(frozen=True)
class BenchRow:
    measure: str
    median_seconds: float
    value: Optional[float]
    n_undefined_pairs: int


@dataclass(frozen=True)
class BenchReport:
    p: int
    m: int
    set_size: int
    repetitions: int
    mc_samples: int
    rng_seed: int
    theta: float
    rows: tuple[BenchRow, ...]


def random_ensemble(
    universe: FeatureUniverse, m: int, set_size: int, rng_seed: int
) -> SelectionEnsemble:
    """m uniform random sets of the given size, on a dedicated seed stream."""
    if not 0 <= set_size <= universe.p:
        raise BadCardinality(
            f"set_size {set_size} must lie in [0, {universe.p}]"
        )
    if m < 2:
        raise InvalidEnsemble("an ensemble needs at least two feature sets")
    seq = np.random.SeedSequence(
        entropy=rng_seed & _SEED_MASK, spawn_key=(_BENCH_STREAM,)
    )
    rng = np.random.Generator(np.random.PCG64(seq))
    ids = universe.ids
    sets = tuple(
        FeatureSet.of(ids[k] for k in draw_subset(rng, universe.p, set_size))
        for _ in range(m)
    )
    return SelectionEnsemble(universe=universe, sets=sets)


def runtime_benchmark(
    sim: SimilarityMatrix,
    m: int,
    set_size: int,
    repetitions: int,
    mc_samples: int,
    rng_seed: int,
    theta: float = 0.9,
    measures: Sequence[MeasureKind] = ALL_MEASURES,
) -> BenchReport:
    """Median wall-clock time per measure on one shared random ensemble.

    Every repetition starts from a fresh expectation cache so the timing
    includes expectation estimation; the reported measure values are
    deterministic for a fixed seed.
    """
    if repetitions < 1:
        raise InvalidEnsemble("repetitions must be at least 1")
    ensemble = random_ensemble(sim.universe, m, set_size, rng_seed)
    config = StabilityConfig(
        theta=theta,
        expectation_mode=MONTE_CARLO,
        mc_samples=mc_samples,
        rng_seed=rng_seed,
    )
    rows = []
    for kind in measures:
        times = []
        result = None
        for _ in range(repetitions):
            cache = ExpectationCache()
            start = time.perf_counter()
            result = compute_measure(kind, ensemble, sim, config, cache)
            times.append(time.perf_counter() - start)
        rows.append(
            BenchRow(
                measure=kind.value,
                median_seconds=statistics.median(times),
                value=result.value,
                n_undefined_pairs=result.n_undefined_pairs,
            )
        )
    return BenchReport(
        p=sim.universe.p,
        m=m,
        set_size=set_size,
        repetitions=repetitions,
        mc_samples=mc_samples,
        rng_seed=rng_seed,
        theta=theta,
        rows=tuple(rows),
    )
