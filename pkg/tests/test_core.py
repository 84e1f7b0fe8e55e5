import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import featstab as fs
from featstab.core import DEGENERATE_DENOMINATOR
from featstab.errors import (
    AsymmetryExceedsTolerance,
    BadDiagonal,
    InvalidEnsemble,
    NonSquare,
    UniverseMismatch,
    ValueOutOfRange,
    WrongPairCount,
)

from conftest import make_universe


class TestFeatureUniverse:
    def test_basic(self):
        u = fs.FeatureUniverse(("a", "b", "c"))
        assert u.p == 3
        assert u.index_of("b") == 1
        assert u.indices({"c", "a"}) == [0, 2]

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InvalidEnsemble):
            fs.FeatureUniverse(("a", "a"))

    def test_empty_rejected(self):
        with pytest.raises(InvalidEnsemble):
            fs.FeatureUniverse(())

    def test_unknown_id(self):
        with pytest.raises(UniverseMismatch):
            fs.FeatureUniverse(("a",)).index_of("z")


class TestFeatureSetAndEnsemble:
    def test_set_validation(self):
        u = make_universe(3)
        fs.FeatureSet.of(("f0", "f2")).validate(u)
        with pytest.raises(UniverseMismatch):
            fs.FeatureSet.of(("nope",)).validate(u)

    def test_ensemble_needs_two_sets(self):
        u = make_universe(3)
        with pytest.raises(InvalidEnsemble):
            fs.SelectionEnsemble(u, (fs.FeatureSet.of(("f0",)),))

    def test_ensemble_validates_members(self):
        u = make_universe(3)
        with pytest.raises(UniverseMismatch):
            fs.SelectionEnsemble(
                u, (fs.FeatureSet.of(("f0",)), fs.FeatureSet.of(("zz",)))
            )


class TestValidateSimilarityMatrix:
    def test_identity_valid(self):
        sim = fs.validate_similarity_matrix(np.eye(2), make_universe(2))
        assert sim.values[0, 1] == 0.0

    def test_symmetric_value(self):
        sim = fs.validate_similarity_matrix(
            [[1, 0.95], [0.95, 1]], make_universe(2)
        )
        assert sim.value("f0", "f1") == 0.95

    def test_out_of_range(self):
        with pytest.raises(ValueOutOfRange):
            fs.validate_similarity_matrix([[1, 1.2], [1.2, 1]], make_universe(2))

    def test_nan_rejected(self):
        with pytest.raises(ValueOutOfRange):
            fs.validate_similarity_matrix(
                [[1, float("nan")], [0.5, 1]], make_universe(2)
            )

    def test_non_square(self):
        with pytest.raises(NonSquare):
            fs.validate_similarity_matrix([[1, 0, 0], [0, 1, 0]], make_universe(2))

    def test_wrong_side(self):
        with pytest.raises(UniverseMismatch):
            fs.validate_similarity_matrix(np.eye(3), make_universe(2))

    def test_asymmetry_rejected(self):
        with pytest.raises(AsymmetryExceedsTolerance):
            fs.validate_similarity_matrix(
                [[1, 0.5], [0.5 + 1e-6, 1]], make_universe(2)
            )

    def test_asymmetry_within_tolerance_averaged(self):
        eps = 4e-9
        sim = fs.validate_similarity_matrix(
            [[1, 0.5], [0.5 + eps, 1]], make_universe(2)
        )
        assert sim.values[0, 1] == sim.values[1, 0] == pytest.approx(0.5 + eps / 2)

    def test_bad_diagonal(self):
        with pytest.raises(BadDiagonal):
            fs.validate_similarity_matrix([[0.9, 0.2], [0.2, 1]], make_universe(2))

    def test_idempotent(self):
        raw = np.array([[1, 0.4, 0.9], [0.4, 1, 0.3], [0.9, 0.3, 1]])
        once = fs.validate_similarity_matrix(raw, make_universe(3))
        twice = fs.validate_similarity_matrix(once.values, make_universe(3))
        assert np.array_equal(once.values, twice.values)

    def test_result_is_readonly(self):
        sim = fs.validate_similarity_matrix(np.eye(2), make_universe(2))
        with pytest.raises(ValueError):
            sim.values[0, 1] = 0.5


class TestPairScore:
    def test_defined(self):
        score = fs.PairScore.from_ratio(0, 1, 1.0, 2.0)
        assert score.value == 0.5 and score.defined

    def test_degenerate_denominator_is_undefined(self):
        score = fs.PairScore.from_ratio(0, 1, 1.0, DEGENERATE_DENOMINATOR / 2)
        assert score.value is None and not score.defined

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_undefined_iff_denominator_degenerate(self, numerator, denominator):
        score = fs.PairScore.from_ratio(0, 1, numerator, denominator)
        assert (score.value is None) == (abs(denominator) < DEGENERATE_DENOMINATOR)


class TestStabilityConfig:
    def test_theta_range(self):
        with pytest.raises(ValueOutOfRange):
            fs.StabilityConfig(theta=1.5)

    def test_monte_carlo_needs_seed(self):
        with pytest.raises(InvalidEnsemble):
            fs.StabilityConfig(expectation_mode="monte_carlo")
        fs.StabilityConfig(expectation_mode="monte_carlo", rng_seed=7)


def _scores(values):
    return [fs.PairScore(0, 1, v, 0.0 if v is None else v, 0.0 if v is None else 1.0) for v in values]


class TestAggregatePairwise:
    def test_single_pair(self):
        assert fs.aggregate_pairwise(_scores([1.0]), 2) == 1.0

    def test_mean(self):
        assert fs.aggregate_pairwise(_scores([1.0, 0.0, -1.0]), 3) == 0.0

    def test_undefined_excluded_from_mean(self):
        # (0.5 + 0.7) / 2, skipping the undefined middle pair
        assert fs.aggregate_pairwise(_scores([0.5, None, 0.7]), 3) == pytest.approx(0.6)

    def test_all_undefined(self):
        assert fs.aggregate_pairwise(_scores([None, None, None]), 3) is None

    def test_wrong_pair_count(self):
        with pytest.raises(WrongPairCount):
            fs.aggregate_pairwise(_scores([1.0, 0.5]), 3)

    @given(
        st.lists(
            st.one_of(st.none(), st.floats(-1.0, 1.0)), min_size=1, max_size=45
        ).filter(lambda vs: len(vs) in {m * (m - 1) // 2 for m in range(2, 11)})
    )
    def test_permutation_invariant(self, values):
        m = next(m for m in range(2, 11) if m * (m - 1) // 2 == len(values))
        forward = fs.aggregate_pairwise(_scores(values), m)
        backward = fs.aggregate_pairwise(_scores(list(reversed(values))), m)
        if forward is None:
            assert backward is None
        else:
            assert forward == backward  # fsum makes the mean order-exact


def test_pair_count_matches_ensemble_size():
    u = make_universe(4)
    sets = tuple(fs.FeatureSet.of(("f0",)) for _ in range(5))
    ensemble = fs.SelectionEnsemble(u, sets)
    result = fs.compute_measure(
        fs.MeasureKind.SMU, ensemble, None, fs.StabilityConfig()
    )
    assert len(result.pair_scores) == 5 * 4 // 2
