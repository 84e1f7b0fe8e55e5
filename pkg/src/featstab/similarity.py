"""Similarity matrices from raw data via absolute Pearson correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import FeatureUniverse, SimilarityMatrix, validate_similarity_matrix
from .errors import LengthMismatch, TooFewObservations, UniverseMismatch


@dataclass(frozen=True)
class DataMatrix:
    """n observations of the universe's p features, one column per feature."""

    universe: FeatureUniverse
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != self.universe.p:
            raise UniverseMismatch(
                f"data matrix must have {self.universe.p} columns, "
                f"got shape {values.shape}"
            )
        if values.shape[0] < 2:
            raise TooFewObservations(
                f"need at least 2 observations, got {values.shape[0]}"
            )
        object.__setattr__(self, "values", values)
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])


def pearson_correlation(x, y) -> Optional[float]:
    """Sample Pearson correlation of two equally long vectors.

    Returns None when either vector has zero variance (the correlation is
    undefined there). The result is clamped into [-1, 1] against rounding.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"vector shapes differ: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise TooFewObservations(f"need at least 2 observations, got {x.size}")
    # max == min catches constant vectors exactly; centering alone cannot,
    # because the computed mean of identical values may differ by rounding
    if x.max() == x.min() or y.max() == y.min():
        return None
    xc = x - x.mean()
    yc = y - y.mean()
    ssx = float(xc @ xc)
    ssy = float(yc @ yc)
    if ssx == 0.0 or ssy == 0.0:
        return None
    r = float(xc @ yc) / math.sqrt(ssx * ssy)
    return min(1.0, max(-1.0, r))


def similarity_from_data(data: DataMatrix) -> SimilarityMatrix:
    """Absolute-correlation similarity matrix of a data matrix's columns.

    Zero-variance columns get off-diagonal similarity 0 (a constant feature
    is not exchangeable with anything); the diagonal stays 1.
    """
    constant = data.values.max(axis=0) == data.values.min(axis=0)
    centered = data.values - data.values.mean(axis=0, keepdims=True)
    centered[:, constant] = 0.0
    norms = np.sqrt((centered * centered).sum(axis=0))
    gram = centered.T @ centered
    denom = np.outer(norms, norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(denom > 0.0, gram / np.where(denom > 0.0, denom, 1.0), 0.0)
    sims = np.clip(np.abs(corr), 0.0, 1.0)
    sims = (sims + sims.T) / 2.0
    np.fill_diagonal(sims, 1.0)
    return validate_similarity_matrix(sims, data.universe)
