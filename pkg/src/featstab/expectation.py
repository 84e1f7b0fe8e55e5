"""Expected pairwise scores under uniform random selections of fixed sizes.

The expected value of ``|A ∩ B| + adjustment(A, B)`` over random sets A, B of
cardinalities k1, k2 is either enumerated exactly over all subset pairs or
estimated by seeded Monte-Carlo sampling. Estimates depend only on the
cardinality pair and the similarity structure, so they are cached per
(k1, k2, kind) while a measure is being computed.

Stream splitting: each (k1, k2, kind) key gets its own child stream of the
master seed via ``SeedSequence(entropy=seed, spawn_key=(min, max, code))``,
so cache hits and evaluation order can never change a result.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

import numpy as np

from .core import EXACT, MONTE_CARLO, SimilarityMatrix, StabilityConfig
from .errors import BadCardinality, EnumerationTooLarge, InvalidEnsemble
from .matching import (
    AdjustmentKind,
    count_kernel,
    directional_counts,
    greedy_kernel,
    lexical_ranks,
    mbm_kernel,
    mean_kernel,
)

_SEED_MASK = (1 << 64) - 1

DEFAULT_ENUMERATION_CAP = 10_000_000


class ScoreKind(enum.Enum):
    """Score families whose expectation can be requested.

    The first five mirror :class:`AdjustmentKind`; SYM_COUNT is the
    symmetrized directional count ``(A(i,j) + A(j,i)) / 2`` used by the
    size-normalized measure's correction.
    """

    NONE = "none"
    COUNT = "count"
    MEAN = "mean"
    GREEDY = "greedy"
    MBM = "mbm"
    SYM_COUNT = "sym_count"

    @classmethod
    def coerce(cls, kind: Union["ScoreKind", AdjustmentKind]) -> "ScoreKind":
        if isinstance(kind, ScoreKind):
            return kind
        return cls(kind.value)


_STREAM_CODE = {
    ScoreKind.NONE: 0,
    ScoreKind.COUNT: 1,
    ScoreKind.MEAN: 2,
    ScoreKind.GREEDY: 3,
    ScoreKind.MBM: 4,
    ScoreKind.SYM_COUNT: 5,
}


@dataclass(frozen=True)
class ExpectationEstimate:
    """Expected pairwise score for one cardinality pair, with provenance."""

    k1: int
    k2: int
    kind: ScoreKind
    value: float
    mode: str
    n_samples: Optional[int] = None
    rng_seed: Optional[int] = None

    def __post_init__(self):
        low = min(self.k1, self.k2)
        if self.kind is ScoreKind.SYM_COUNT:
            # t + (k1 - t + k2 - t) / 2 is constant in the overlap t
            bound = (self.k1 + self.k2) / 2
        elif self.kind is ScoreKind.NONE:
            bound = low
        else:
            bound = 2 * low
        if not -1e-9 <= self.value <= bound + 1e-9:
            raise InvalidEnsemble(
                f"expected score {self.value} outside [0, {bound}] "
                f"for k1={self.k1}, k2={self.k2}, kind={self.kind.value}"
            )


class ExpectationCache:
    """Estimates shared per (k1, k2, kind); lookups are cardinality-symmetric."""

    def __init__(self):
        self._store: dict[tuple[int, int, ScoreKind], ExpectationEstimate] = {}

    @staticmethod
    def _key(k1: int, k2: int, kind: ScoreKind) -> tuple[int, int, ScoreKind]:
        return (min(k1, k2), max(k1, k2), kind)

    def lookup(self, k1: int, k2: int, kind: ScoreKind) -> Optional[ExpectationEstimate]:
        return self._store.get(self._key(k1, k2, kind))

    def store(self, estimate: ExpectationEstimate) -> None:
        self._store[self._key(estimate.k1, estimate.k2, estimate.kind)] = estimate

    def __len__(self) -> int:
        return len(self._store)


def _check_cardinalities(k1: int, k2: int, p: int) -> None:
    if not (0 <= k1 <= p and 0 <= k2 <= p):
        raise BadCardinality(f"cardinalities ({k1}, {k2}) must lie in [0, {p}]")


def draw_subset(rng: np.random.Generator, p: int, k: int) -> list[int]:
    """k distinct indices from range(p), uniform, via partial Fisher-Yates.

    The shuffle state is kept sparse in a dict so a draw costs O(k) no matter
    how large the universe is.
    """
    if k == 0:
        return []
    u = rng.random(k)
    displaced: dict[int, int] = {}
    out = []
    for i in range(k):
        j = i + int(u[i] * (p - i))
        out.append(displaced.get(j, j))
        displaced[j] = displaced.get(i, i)
    return out


def _score(
    values: np.ndarray,
    theta: float,
    lexrank: np.ndarray,
    kind: ScoreKind,
    a: set[int],
    b: set[int],
) -> float:
    intersection = len(a & b)
    if kind is ScoreKind.NONE:
        return float(intersection)
    left = sorted(a - b)
    right = sorted(b - a)
    if kind is ScoreKind.COUNT:
        return intersection + count_kernel(values, theta, left, right)
    if kind is ScoreKind.SYM_COUNT:
        a_ij, a_ji = directional_counts(values, theta, left, right)
        return intersection + (a_ij + a_ji) / 2
    if kind is ScoreKind.MEAN:
        return intersection + mean_kernel(values, theta, left, right)
    if kind is ScoreKind.GREEDY:
        return intersection + greedy_kernel(values, theta, left, right, lexrank)
    return intersection + mbm_kernel(values, theta, left, right)


def exact_expected_score(
    k1: int,
    k2: int,
    kind: Union[ScoreKind, AdjustmentKind],
    sim: SimilarityMatrix,
    theta: float,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ExpectationEstimate:
    """Average score over every ordered pair of subsets with sizes k1 and k2.

    Kind NONE has the closed form k1*k2/p and never enumerates; for the other
    kinds the enumeration must fit under ``cap``.
    """
    kind = ScoreKind.coerce(kind)
    p = sim.universe.p
    _check_cardinalities(k1, k2, p)
    if kind is ScoreKind.NONE:
        return ExpectationEstimate(k1, k2, kind, k1 * k2 / p, EXACT)
    n_pairs = math.comb(p, k1) * math.comb(p, k2)
    if n_pairs > cap:
        raise EnumerationTooLarge(
            f"C({p},{k1})*C({p},{k2}) = {n_pairs} exceeds the cap of {cap}"
        )
    values = sim.values
    lexrank = lexical_ranks(sim.universe)
    # the score is symmetric in its sets, so materialize only the smaller
    # subset family and stream the larger one
    inner_k, outer_k = sorted((k1, k2), key=lambda k: math.comb(p, k))
    inner = [set(c) for c in combinations(range(p), inner_k)]
    total = math.fsum(
        _score(values, theta, lexrank, kind, set(outer), b)
        for outer in combinations(range(p), outer_k)
        for b in inner
    )
    return ExpectationEstimate(k1, k2, kind, total / n_pairs, EXACT)


def mc_expected_score(
    k1: int,
    k2: int,
    kind: Union[ScoreKind, AdjustmentKind],
    sim: SimilarityMatrix,
    theta: float,
    n_samples: int,
    rng_seed: int,
) -> ExpectationEstimate:
    """Monte-Carlo estimate of the expected score; bit-reproducible per seed.

    Each replication draws both sets fresh with equal selection probability
    for every feature. The stream and the evaluation order are canonicalized
    on (min(k1,k2), max(k1,k2)), so swapping the cardinalities returns the
    bit-identical estimate.
    """
    kind = ScoreKind.coerce(kind)
    p = sim.universe.p
    _check_cardinalities(k1, k2, p)
    if n_samples < 1:
        raise InvalidEnsemble("n_samples must be at least 1")
    low, high = min(k1, k2), max(k1, k2)
    seed_seq = np.random.SeedSequence(
        entropy=rng_seed & _SEED_MASK, spawn_key=(low, high, _STREAM_CODE[kind])
    )
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    values = sim.values
    lexrank = lexical_ranks(sim.universe)
    scores = [
        _score(
            values,
            theta,
            lexrank,
            kind,
            set(draw_subset(rng, p, low)),
            set(draw_subset(rng, p, high)),
        )
        for _ in range(n_samples)
    ]
    return ExpectationEstimate(
        k1,
        k2,
        kind,
        math.fsum(scores) / n_samples,
        MONTE_CARLO,
        n_samples=n_samples,
        rng_seed=rng_seed,
    )


def expected_score(
    config: StabilityConfig,
    k1: int,
    k2: int,
    kind: Union[ScoreKind, AdjustmentKind],
    sim: SimilarityMatrix,
    cache: Optional[ExpectationCache] = None,
) -> ExpectationEstimate:
    """Mode-dispatching, cache-aware expectation for one cardinality pair.

    Exact mode errors (rather than silently degrading) when the enumeration
    would exceed the configured cap.
    """
    kind = ScoreKind.coerce(kind)
    if cache is not None:
        hit = cache.lookup(k1, k2, kind)
        if hit is not None:
            return hit
    if config.expectation_mode == EXACT:
        estimate = exact_expected_score(
            k1, k2, kind, sim, config.theta, cap=config.exact_enumeration_cap
        )
    else:
        estimate = mc_expected_score(
            k1, k2, kind, sim, config.theta, config.mc_samples, config.rng_seed
        )
    if cache is not None:
        cache.store(estimate)
    return estimate
