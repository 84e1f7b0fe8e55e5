"""Stability measures for feature selection that treat highly similar
features as exchangeable.

The package quantifies how stable a feature-selection procedure is across an
ensemble of selected feature sets: an unadjusted chance-corrected overlap
measure (SMU), a similarity-extended Jaccard measure (SMZ), and
chance-corrected adjusted measures (SMY and the SMA family) whose adjustments
range from directional counts to maximum bipartite matching.
"""

from .core import (
    FeatureSet,
    FeatureUniverse,
    MeasureResult,
    PairScore,
    SelectionEnsemble,
    SimilarityMatrix,
    StabilityConfig,
    aggregate_pairwise,
    validate_similarity_matrix,
)
from .expectation import (
    ExpectationCache,
    ExpectationEstimate,
    ScoreKind,
    exact_expected_score,
    expected_score,
    mc_expected_score,
)
from .matching import (
    AdjustmentKind,
    ThresholdedBipartiteGraph,
    adj_count,
    adj_mean,
    adjustment,
    brute_force_matching,
    build_graph,
    greedy_matching,
    maximum_bipartite_matching,
)
from .measures import (
    ALL_MEASURES,
    MeasureKind,
    compute_measure,
    pairwise_sma,
    pairwise_smu,
    pairwise_smy,
    pairwise_smz,
)
from .similarity import DataMatrix, pearson_correlation, similarity_from_data

__version__ = "0.1.0"

__all__ = [
    "AdjustmentKind",
    "ALL_MEASURES",
    "DataMatrix",
    "ExpectationCache",
    "ExpectationEstimate",
    "FeatureSet",
    "FeatureUniverse",
    "MeasureKind",
    "MeasureResult",
    "PairScore",
    "ScoreKind",
    "SelectionEnsemble",
    "SimilarityMatrix",
    "StabilityConfig",
    "ThresholdedBipartiteGraph",
    "adj_count",
    "adj_mean",
    "adjustment",
    "aggregate_pairwise",
    "brute_force_matching",
    "build_graph",
    "compute_measure",
    "exact_expected_score",
    "expected_score",
    "greedy_matching",
    "maximum_bipartite_matching",
    "mc_expected_score",
    "pairwise_sma",
    "pairwise_smu",
    "pairwise_smy",
    "pairwise_smz",
    "pearson_correlation",
    "similarity_from_data",
    "validate_similarity_matrix",
    "__version__",
]
