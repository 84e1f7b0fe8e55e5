"""The seven stability measures: pairwise scores plus ensemble aggregation.

SMU scores raw set overlap, corrected for chance and normalized to max 1.
SMZ extends the Jaccard index with similarity mass between the sets (not
corrected for chance). SMY and the four SMA variants correct an adjusted
overlap by its expectation under random selection of the same cardinalities;
they differ in the adjustment added to the intersection size.
"""

from __future__ import annotations

import enum
import math
from typing import Optional

import numpy as np

from .core import (
    FeatureSet,
    MeasureResult,
    PairScore,
    SelectionEnsemble,
    SimilarityMatrix,
    StabilityConfig,
    aggregate_pairwise,
)
from .errors import (
    BadCardinality,
    MissingSimilarityMatrix,
    UniverseMismatch,
    UnknownMeasure,
)
from .expectation import (
    ExpectationCache,
    ExpectationEstimate,
    ScoreKind,
    expected_score,
)
from .matching import (
    AdjustmentKind,
    count_kernel,
    directional_counts,
    greedy_kernel,
    lexical_ranks,
    mbm_kernel,
    mean_kernel,
)


class MeasureKind(enum.Enum):
    """The supported stability measures, by their conventional names."""

    SMU = "SMU"
    SMZ = "SMZ"
    SMY = "SMY"
    SMA_COUNT = "SMA-Count"
    SMA_MEAN = "SMA-Mean"
    SMA_GREEDY = "SMA-Greedy"
    SMA_MBM = "SMA-MBM"

    @classmethod
    def parse(cls, name: str) -> "MeasureKind":
        normalized = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value.lower() == normalized:
                return kind
        raise UnknownMeasure(
            f"unknown measure {name!r}; expected one of "
            f"{[k.value for k in cls]}"
        )

    @property
    def needs_similarity(self) -> bool:
        return self is not MeasureKind.SMU

    @property
    def adjustment_kind(self) -> Optional[AdjustmentKind]:
        return _SMA_ADJUSTMENTS.get(self)

    @property
    def score_kind(self) -> Optional[ScoreKind]:
        """Expectation score family, for the chance-corrected measures."""
        if self is MeasureKind.SMY:
            return ScoreKind.SYM_COUNT
        kind = _SMA_ADJUSTMENTS.get(self)
        return ScoreKind.coerce(kind) if kind is not None else None


_SMA_ADJUSTMENTS = {
    MeasureKind.SMA_COUNT: AdjustmentKind.COUNT,
    MeasureKind.SMA_MEAN: AdjustmentKind.MEAN,
    MeasureKind.SMA_GREEDY: AdjustmentKind.GREEDY,
    MeasureKind.SMA_MBM: AdjustmentKind.MBM,
}

ALL_MEASURES: tuple[MeasureKind, ...] = tuple(MeasureKind)


def _validated_indices(vi: FeatureSet, vj: FeatureSet, sim: SimilarityMatrix):
    vi.validate(sim.universe)
    vj.validate(sim.universe)
    left = sim.universe.indices(vi.members - vj.members)
    right = sim.universe.indices(vj.members - vi.members)
    return left, right


def pairwise_smu(vi: FeatureSet, vj: FeatureSet, p: int, i: int = 0, j: int = 1) -> PairScore:
    """Chance-corrected overlap of one set pair over a p-feature universe."""
    k1, k2 = len(vi), len(vj)
    intersection = len(vi.members & vj.members)
    expected = k1 * k2 / p
    upper = math.sqrt(k1 * k2)
    return PairScore.from_ratio(i, j, intersection - expected, upper - expected)


def pairwise_smz(
    vi: FeatureSet,
    vj: FeatureSet,
    sim: SimilarityMatrix,
    theta: float,
    i: int = 0,
    j: int = 1,
) -> PairScore:
    """Similarity-extended Jaccard score of one set pair.

    The cross terms sum, over every x in the one set, the qualifying
    similarities to features only in the other set, scaled by that other
    set's size. Undefined when both sets are empty.
    """
    vi.validate(sim.universe)
    vj.validate(sim.universe)
    union = len(vi.members | vj.members)
    intersection = len(vi.members & vj.members)
    numerator = intersection + _smz_cross(vi, vj, sim, theta) + _smz_cross(vj, vi, sim, theta)
    return PairScore.from_ratio(i, j, numerator, float(union))


def _smz_cross(vi: FeatureSet, vj: FeatureSet, sim: SimilarityMatrix, theta: float) -> float:
    if len(vj) == 0:
        return 0.0
    rows = sim.universe.indices(vi.members)
    cols = sim.universe.indices(vj.members - vi.members)
    if not rows or not cols:
        return 0.0
    block = sim.values[np.ix_(rows, cols)]
    qualified = np.where(block >= theta, block, 0.0)
    return float(qualified.sum()) / len(vj)


def pairwise_smy(
    vi: FeatureSet,
    vj: FeatureSet,
    sim: SimilarityMatrix,
    theta: float,
    expectation: ExpectationEstimate,
    i: int = 0,
    j: int = 1,
) -> PairScore:
    """Chance-corrected score with the symmetrized directional-count adjustment.

    ``expectation`` must estimate the same symmetrized score for this
    cardinality pair.
    """
    _check_expectation(expectation, len(vi), len(vj))
    left, right = _validated_indices(vi, vj, sim)
    intersection = len(vi.members & vj.members)
    a_ij, a_ji = directional_counts(sim.values, theta, left, right)
    score = intersection + (a_ij + a_ji) / 2
    upper = (len(vi) + len(vj)) / 2
    e = expectation.value
    return PairScore.from_ratio(i, j, score - e, upper - e)


def pairwise_sma(
    vi: FeatureSet,
    vj: FeatureSet,
    sim: SimilarityMatrix,
    theta: float,
    kind: AdjustmentKind,
    expectation: ExpectationEstimate,
    i: int = 0,
    j: int = 1,
) -> PairScore:
    """Chance-corrected adjusted overlap, normalized by sqrt(|Vi| |Vj|)."""
    _check_expectation(expectation, len(vi), len(vj))
    left, right = _validated_indices(vi, vj, sim)
    intersection = len(vi.members & vj.members)
    values = sim.values
    if kind is AdjustmentKind.NONE:
        adj = 0.0
    elif kind is AdjustmentKind.COUNT:
        adj = float(count_kernel(values, theta, left, right))
    elif kind is AdjustmentKind.MEAN:
        adj = mean_kernel(values, theta, left, right)
    elif kind is AdjustmentKind.GREEDY:
        adj = float(greedy_kernel(values, theta, left, right, lexical_ranks(sim.universe)))
    else:
        adj = float(mbm_kernel(values, theta, left, right))
    upper = math.sqrt(len(vi) * len(vj))
    e = expectation.value
    return PairScore.from_ratio(i, j, intersection + adj - e, upper - e)


def _check_expectation(expectation: ExpectationEstimate, k1: int, k2: int) -> None:
    if {expectation.k1, expectation.k2} != {k1, k2}:
        raise BadCardinality(
            f"expectation is for cardinalities ({expectation.k1}, {expectation.k2}), "
            f"sets have ({k1}, {k2})"
        )


def pairwise_score(
    kind: MeasureKind,
    vi: FeatureSet,
    vj: FeatureSet,
    sim: Optional[SimilarityMatrix],
    config: StabilityConfig,
    cache: Optional[ExpectationCache] = None,
    p: Optional[int] = None,
    i: int = 0,
    j: int = 1,
) -> PairScore:
    """Score one set pair under any measure, fetching expectations as needed."""
    if kind is MeasureKind.SMU:
        if p is None:
            if sim is None:
                raise MissingSimilarityMatrix(
                    "SMU needs the universe size when no similarity matrix is given"
                )
            p = sim.universe.p
        return pairwise_smu(vi, vj, p, i, j)
    if sim is None:
        raise MissingSimilarityMatrix(f"{kind.value} requires a similarity matrix")
    if kind is MeasureKind.SMZ:
        return pairwise_smz(vi, vj, sim, config.theta, i, j)
    estimate = expected_score(config, len(vi), len(vj), kind.score_kind, sim, cache)
    if kind is MeasureKind.SMY:
        return pairwise_smy(vi, vj, sim, config.theta, estimate, i, j)
    return pairwise_sma(vi, vj, sim, config.theta, kind.adjustment_kind, estimate, i, j)


def compute_measure(
    kind: MeasureKind,
    ensemble: SelectionEnsemble,
    sim: Optional[SimilarityMatrix],
    config: StabilityConfig,
    cache: Optional[ExpectationCache] = None,
) -> MeasureResult:
    """Aggregate the pairwise scores of every i < j pair of the ensemble.

    SMU runs without a similarity matrix; every other measure requires one.
    One expectation cache serves the whole computation (and may be shared
    across measures on the same similarity matrix and configuration).
    """
    if kind.needs_similarity and sim is None:
        raise MissingSimilarityMatrix(f"{kind.value} requires a similarity matrix")
    if sim is not None and sim.universe != ensemble.universe:
        raise UniverseMismatch(
            "similarity matrix and ensemble use different universes"
        )
    if cache is None:
        cache = ExpectationCache()
    p = ensemble.universe.p
    scores = []
    m = ensemble.m
    for i in range(m - 1):
        for j in range(i + 1, m):
            scores.append(
                pairwise_score(
                    kind, ensemble.sets[i], ensemble.sets[j], sim, config, cache, p, i, j
                )
            )
    value = aggregate_pairwise(scores, m)
    n_undefined = sum(1 for s in scores if not s.defined)
    return MeasureResult(
        measure_name=kind.value,
        value=value,
        pair_scores=tuple(scores),
        n_undefined_pairs=n_undefined,
    )
