"""Domain types, similarity-matrix validation, and pair-score aggregation.

All types are immutable after construction and safe to share across threads;
the functions in this module are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    AsymmetryExceedsTolerance,
    BadDiagonal,
    InvalidEnsemble,
    NonSquare,
    UniverseMismatch,
    ValueOutOfRange,
    WrongPairCount,
)

#: Maximum tolerated |S[i,j] - S[j,i]| before a matrix is rejected.
SYMMETRY_TOLERANCE = 1e-8

#: Maximum tolerated |S[i,i] - 1|.
DIAGONAL_TOLERANCE = 1e-12

#: Pair scores whose denominator magnitude falls below this are undefined.
DEGENERATE_DENOMINATOR = 1e-12

EXACT = "exact"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class FeatureUniverse:
    """The ordered collection of feature identifiers under consideration."""

    ids: tuple[str, ...]

    def __post_init__(self):
        if len(self.ids) < 1:
            raise InvalidEnsemble("a universe needs at least one feature")
        if len(set(self.ids)) != len(self.ids):
            raise InvalidEnsemble("universe feature ids must be unique")
        object.__setattr__(self, "ids", tuple(self.ids))

    @property
    def p(self) -> int:
        return len(self.ids)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {fid: k for k, fid in enumerate(self.ids)}

    def index_of(self, feature_id: str) -> int:
        try:
            return self._index[feature_id]
        except KeyError:
            raise UniverseMismatch(f"unknown feature id {feature_id!r}") from None

    def indices(self, members: Iterable[str]) -> list[int]:
        """Universe positions of the given ids, in ascending position order."""
        return sorted(self.index_of(fid) for fid in members)


@dataclass(frozen=True)
class FeatureSet:
    """One selected set of features, identified by their string ids."""

    members: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))

    @classmethod
    def of(cls, ids: Iterable[str]) -> "FeatureSet":
        return cls(frozenset(ids))

    def __len__(self) -> int:
        return len(self.members)

    def validate(self, universe: FeatureUniverse) -> None:
        extra = self.members - set(universe.ids)
        if extra:
            raise UniverseMismatch(
                f"feature ids not in universe: {sorted(extra)}"
            )


@dataclass(frozen=True)
class SelectionEnsemble:
    """The m selected feature sets whose mutual similarity is being scored."""

    universe: FeatureUniverse
    sets: tuple[FeatureSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if len(self.sets) < 2:
            raise InvalidEnsemble("an ensemble needs at least two feature sets")
        for s in self.sets:
            s.validate(self.universe)

    @property
    def m(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Validated symmetric p x p feature-similarity matrix with unit diagonal.

    Construct through :func:`validate_similarity_matrix`; the array is frozen.
    """

    universe: FeatureUniverse
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        self.values.setflags(write=False)

    def value(self, x: str, y: str) -> float:
        return float(self.values[self.universe.index_of(x), self.universe.index_of(y)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(
            self.values, other.values
        )


def validate_similarity_matrix(raw, universe: FeatureUniverse) -> SimilarityMatrix:
    """Check a raw matrix and return it as a validated :class:`SimilarityMatrix`.

    Symmetry is enforced by averaging the (i, j) and (j, i) entries when the
    discrepancy is within tolerance; the diagonal is forced to exactly 1.
    """
    values = np.asarray(raw, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise NonSquare(f"similarity matrix must be square, got shape {values.shape}")
    if values.shape[0] != universe.p:
        raise UniverseMismatch(
            f"matrix side {values.shape[0]} does not match universe size {universe.p}"
        )
    in_range = (values >= 0.0) & (values <= 1.0)
    if not bool(in_range.all()):
        i, j = np.argwhere(~in_range)[0]
        raise ValueOutOfRange(
            f"similarity[{i},{j}] = {values[i, j]} is outside [0, 1]"
        )
    asym = np.abs(values - values.T)
    if float(asym.max(initial=0.0)) > SYMMETRY_TOLERANCE:
        i, j = np.argwhere(asym > SYMMETRY_TOLERANCE)[0]
        raise AsymmetryExceedsTolerance(
            f"|similarity[{i},{j}] - similarity[{j},{i}]| = {asym[i, j]:g} "
            f"exceeds {SYMMETRY_TOLERANCE:g}"
        )
    diag_off = np.abs(np.diagonal(values) - 1.0)
    if float(diag_off.max(initial=0.0)) > DIAGONAL_TOLERANCE:
        i = int(np.argmax(diag_off))
        raise BadDiagonal(f"similarity[{i},{i}] = {values[i, i]} is not 1")
    symmetric = (values + values.T) / 2.0
    np.fill_diagonal(symmetric, 1.0)
    return SimilarityMatrix(universe=universe, values=symmetric)


@dataclass(frozen=True)
class StabilityConfig:
    """Knobs shared by every measure computation."""

    theta: float = 0.9
    expectation_mode: str = EXACT
    mc_samples: int = 10_000
    rng_seed: Optional[int] = None
    exact_enumeration_cap: int = 10_000_000

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueOutOfRange(f"theta = {self.theta} is outside [0, 1]")
        if self.expectation_mode not in (EXACT, MONTE_CARLO):
            raise InvalidEnsemble(
                f"expectation_mode must be {EXACT!r} or {MONTE_CARLO!r}"
            )
        if self.mc_samples < 1:
            raise InvalidEnsemble("mc_samples must be at least 1")
        if self.exact_enumeration_cap < 1:
            raise InvalidEnsemble("exact_enumeration_cap must be at least 1")
        if self.expectation_mode == MONTE_CARLO and self.rng_seed is None:
            raise InvalidEnsemble("monte_carlo mode requires rng_seed")


@dataclass(frozen=True)
class PairScore:
    """Score of one set pair, kept with its numerator/denominator diagnostics.

    ``value`` is None exactly when the denominator magnitude is degenerate.
    """

    i: int
    j: int
    value: Optional[float]
    numerator: float
    denominator: float

    def __post_init__(self):
        degenerate = abs(self.denominator) < DEGENERATE_DENOMINATOR
        if degenerate != (self.value is None):
            raise InvalidEnsemble(
                "PairScore value must be None exactly when the denominator "
                "is degenerate"
            )

    @classmethod
    def from_ratio(cls, i: int, j: int, numerator: float, denominator: float) -> "PairScore":
        if abs(denominator) < DEGENERATE_DENOMINATOR:
            return cls(i, j, None, numerator, denominator)
        return cls(i, j, numerator / denominator, numerator, denominator)

    @property
    def defined(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class MeasureResult:
    """A stability value with its per-pair breakdown."""

    measure_name: str
    value: Optional[float]
    pair_scores: tuple[PairScore, ...]
    n_undefined_pairs: int


def aggregate_pairwise(scores: Sequence[PairScore], m: int) -> Optional[float]:
    """Average the defined pair scores of an m-set ensemble.

    Returns None when every pair is undefined. Undefined pairs are excluded
    from the mean rather than raising, so mixed ensembles stay scoreable.
    """
    expected = m * (m - 1) // 2
    if len(scores) != expected:
        raise WrongPairCount(
            f"expected {expected} pair scores for m={m}, got {len(scores)}"
        )
    defined = [s.value for s in scores if s.value is not None]
    if not defined:
        return None
    return math.fsum(defined) / len(defined)
