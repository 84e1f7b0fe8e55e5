import numpy as np
import pytest

import featstab as fs
from featstab.core import EXACT, MONTE_CARLO
from featstab.errors import MissingSimilarityMatrix, UniverseMismatch
from featstab.expectation import ScoreKind
from featstab.experiments import demo_similarity_matrix
from featstab.matching import AdjustmentKind
from featstab.measures import ALL_MEASURES, MeasureKind, pairwise_score

from conftest import make_universe, random_feature_set, random_similarity

import oracle

SMA_KINDS = (
    MeasureKind.SMA_COUNT,
    MeasureKind.SMA_MEAN,
    MeasureKind.SMA_GREEDY,
    MeasureKind.SMA_MBM,
)


def fset(universe, *indices):
    return fs.FeatureSet.of(universe.ids[k] for k in indices)


def identity_sim(p):
    return fs.validate_similarity_matrix(np.eye(p), make_universe(p))


@pytest.fixture(scope="module")
def demo_sim():
    return demo_similarity_matrix()


class TestMeasureKind:
    def test_parse(self):
        assert MeasureKind.parse("SMA-Count") is MeasureKind.SMA_COUNT
        assert MeasureKind.parse("sma_mbm") is MeasureKind.SMA_MBM
        assert MeasureKind.parse("smu") is MeasureKind.SMU
        with pytest.raises(fs.errors.UnknownMeasure):
            MeasureKind.parse("SMX")

    def test_needs_similarity(self):
        assert not MeasureKind.SMU.needs_similarity
        assert all(k.needs_similarity for k in ALL_MEASURES if k is not MeasureKind.SMU)


class TestPairwiseSMU:
    def test_equal_sets(self):
        u = make_universe(4)
        assert fs.pairwise_smu(fset(u, 0, 1), fset(u, 0, 1), 4).value == 1.0

    def test_disjoint_singletons(self):
        u = make_universe(4)
        score = fs.pairwise_smu(fset(u, 0), fset(u, 1), 4)
        assert score.value == pytest.approx(-1 / 3)

    def test_full_sets_undefined(self):
        u = make_universe(3)
        assert fs.pairwise_smu(fset(u, 0, 1, 2), fset(u, 0, 1, 2), 3).value is None

    def test_one_full_set_defined(self):
        u = make_universe(3)
        assert fs.pairwise_smu(fset(u, 0, 1, 2), fset(u, 0), 3).value is not None

    def test_empty_set_undefined(self):
        u = make_universe(3)
        assert fs.pairwise_smu(fset(u), fset(u, 0), 3).value is None


class TestPairwiseSMZ:
    def test_equal_sets(self, demo_sim):
        s = fset(demo_sim.universe, 0, 3)
        assert fs.pairwise_smz(s, s, demo_sim, 0.9).value == 1.0

    def test_similar_singletons(self):
        u = make_universe(2)
        sim = fs.validate_similarity_matrix([[1, 0.95], [0.95, 1]], u)
        score = fs.pairwise_smz(fset(u, 0), fset(u, 1), sim, 0.9)
        assert score.value == pytest.approx(0.95)

    def test_dissimilar_singletons(self):
        u = make_universe(2)
        sim = fs.validate_similarity_matrix([[1, 0.5], [0.5, 1]], u)
        assert fs.pairwise_smz(fset(u, 0), fset(u, 1), sim, 0.9).value == 0.0

    def test_empty_union_undefined(self, demo_sim):
        empty = fset(demo_sim.universe)
        assert fs.pairwise_smz(empty, empty, demo_sim, 0.9).value is None

    def test_equals_jaccard_without_similar_features(self, rng):
        sim = identity_sim(8)
        for _ in range(50):
            vi = random_feature_set(rng, sim.universe)
            vj = random_feature_set(rng, sim.universe)
            if not vi.members | vj.members:
                continue
            jaccard = len(vi.members & vj.members) / len(vi.members | vj.members)
            assert fs.pairwise_smz(vi, vj, sim, 0.9).value == pytest.approx(jaccard)

    def test_range_zero_to_two(self, rng):
        for _ in range(200):
            p = int(rng.integers(2, 10))
            sim = random_similarity(rng, p)
            vi = random_feature_set(rng, sim.universe)
            vj = random_feature_set(rng, sim.universe)
            value = fs.pairwise_smz(vi, vj, sim, 0.9).value
            if value is not None:
                assert 0.0 <= value <= 2.0


class TestPairwiseSMY:
    def test_equal_sets_without_similar_features(self):
        sim = identity_sim(4)
        vi = fset(sim.universe, 0, 1)
        est = fs.exact_expected_score(2, 2, ScoreKind.SYM_COUNT, sim, 0.9)
        assert fs.pairwise_smy(vi, vi, sim, 0.9, est).value == 1.0

    def test_corrected_overlap_without_similar_features(self):
        # S = 1, E = k1*k2/p = 1, denominator (2+2)/2 - 1 = 1 -> 0
        sim = identity_sim(4)
        u = sim.universe
        est = fs.exact_expected_score(2, 2, ScoreKind.SYM_COUNT, sim, 0.9)
        score = fs.pairwise_smy(fset(u, 0, 1), fset(u, 0, 2), sim, 0.9, est)
        assert score.value == pytest.approx(0.0, abs=1e-12)

    def test_size_mismatch_pathology(self):
        # disjoint sets of sizes 20 and 2, every feature of each side similar
        # to the other side: score saturates at 1 while every SMA stays below
        p = 22
        universe = make_universe(p)
        values = np.eye(p)
        for k in range(20):
            values[k, 20] = values[20, k] = 0.95
            values[k, 21] = values[21, k] = 0.95
        sim = fs.validate_similarity_matrix(values, universe)
        vi = fset(universe, *range(20))
        vj = fset(universe, 20, 21)
        est = fs.exact_expected_score(20, 2, ScoreKind.SYM_COUNT, sim, 0.9)
        smy = fs.pairwise_smy(vi, vj, sim, 0.9, est)
        assert smy.value == pytest.approx(1.0, abs=1e-12)
        for kind in SMA_KINDS:
            est_kind = fs.exact_expected_score(20, 2, kind.score_kind, sim, 0.9)
            sma = fs.pairwise_sma(
                vi, vj, sim, 0.9, kind.adjustment_kind, est_kind
            )
            assert sma.value is not None and sma.value < 1.0


class TestPairwiseSMA:
    def test_equal_sets_all_kinds(self, demo_sim):
        vi = fset(demo_sim.universe, 0, 4)
        for kind in SMA_KINDS:
            est = fs.exact_expected_score(2, 2, kind.score_kind, demo_sim, 0.9)
            assert fs.pairwise_sma(
                vi, vi, demo_sim, 0.9, kind.adjustment_kind, est
            ).value == 1.0

    def test_identical_to_smu_without_similar_features(self, rng):
        sim = identity_sim(7)
        for _ in range(60):
            vi = random_feature_set(rng, sim.universe)
            vj = random_feature_set(rng, sim.universe)
            smu = fs.pairwise_smu(vi, vj, 7)
            for kind in SMA_KINDS:
                est = fs.exact_expected_score(
                    len(vi), len(vj), kind.score_kind, sim, 0.9
                )
                sma = fs.pairwise_sma(vi, vj, sim, 0.9, kind.adjustment_kind, est)
                if smu.value is None:
                    assert sma.value is None
                else:
                    assert sma.value == pytest.approx(smu.value, abs=1e-12)

    def test_kind_none_reproduces_smu(self, demo_sim, rng):
        for _ in range(60):
            vi = random_feature_set(rng, demo_sim.universe)
            vj = random_feature_set(rng, demo_sim.universe)
            est = fs.exact_expected_score(
                len(vi), len(vj), ScoreKind.NONE, demo_sim, 0.9
            )
            sma = fs.pairwise_sma(vi, vj, demo_sim, 0.9, AdjustmentKind.NONE, est)
            smu = fs.pairwise_smu(vi, vj, 7)
            if smu.value is None:
                assert sma.value is None
            else:
                assert sma.value == pytest.approx(smu.value, abs=1e-12)

    def test_defined_scores_capped_at_one(self, rng):
        config = fs.StabilityConfig(theta=0.9, expectation_mode=EXACT)
        for _ in range(150):
            p = int(rng.integers(2, 9))
            sim = random_similarity(rng, p, palette=(0.9, 0.95, 1.0))
            vi = random_feature_set(rng, sim.universe)
            vj = random_feature_set(rng, sim.universe)
            cache = fs.ExpectationCache()
            for kind in (MeasureKind.SMU, MeasureKind.SMY, *SMA_KINDS):
                score = pairwise_score(kind, vi, vj, sim, config, cache, p)
                if score.value is not None:
                    assert score.value <= 1.0 + 1e-12
                if vi == vj and 0 < len(vi) < p and score.value is not None:
                    # undefined is possible when the expectation saturates the
                    # upper bound (every same-size random pair scores maximal)
                    assert score.value == pytest.approx(1.0, abs=1e-12)

    def test_smu_equality_only_for_equal_sets(self, rng):
        for _ in range(200):
            p = int(rng.integers(2, 10))
            u = make_universe(p)
            vi = random_feature_set(rng, u)
            vj = random_feature_set(rng, u)
            score = fs.pairwise_smu(vi, vj, p)
            if score.value is not None and vi != vj:
                assert score.value < 1.0


class TestComputeMeasure:
    def test_identical_ensembles_score_one(self, demo_sim):
        config = fs.StabilityConfig(theta=0.9, expectation_mode=EXACT)
        sets = tuple(fset(demo_sim.universe, 0, 3, 5) for _ in range(4))
        ensemble = fs.SelectionEnsemble(demo_sim.universe, sets)
        for kind in ALL_MEASURES:
            result = fs.compute_measure(kind, ensemble, demo_sim, config)
            assert result.value == pytest.approx(1.0, abs=1e-12)
            assert result.n_undefined_pairs == 0

    def test_two_sets_equal_single_pair_score(self, demo_sim):
        config = fs.StabilityConfig(theta=0.9, expectation_mode=EXACT)
        vi = fset(demo_sim.universe, 0, 1)
        vj = fset(demo_sim.universe, 2, 4)
        ensemble = fs.SelectionEnsemble(demo_sim.universe, (vi, vj))
        for kind in ALL_MEASURES:
            result = fs.compute_measure(kind, ensemble, demo_sim, config)
            direct = pairwise_score(kind, vi, vj, demo_sim, config, None, 7)
            assert result.value == direct.value

    def test_missing_similarity(self, demo_sim):
        ensemble = fs.SelectionEnsemble(
            demo_sim.universe,
            (fset(demo_sim.universe, 0), fset(demo_sim.universe, 1)),
        )
        with pytest.raises(MissingSimilarityMatrix):
            fs.compute_measure(
                MeasureKind.SMZ, ensemble, None, fs.StabilityConfig()
            )

    def test_expectation_errors_propagate(self, demo_sim):
        config = fs.StabilityConfig(
            theta=0.9, expectation_mode=EXACT, exact_enumeration_cap=10
        )
        ensemble = fs.SelectionEnsemble(
            demo_sim.universe,
            (fset(demo_sim.universe, 0, 1, 2), fset(demo_sim.universe, 3, 4, 5)),
        )
        with pytest.raises(fs.errors.EnumerationTooLarge):
            fs.compute_measure(MeasureKind.SMA_COUNT, ensemble, demo_sim, config)

    def test_universe_mismatch(self, demo_sim):
        other = make_universe(7, prefix="z")
        ensemble = fs.SelectionEnsemble(
            other, (fs.FeatureSet.of(("z0",)), fs.FeatureSet.of(("z1",)))
        )
        with pytest.raises(UniverseMismatch):
            fs.compute_measure(
                MeasureKind.SMZ, ensemble, demo_sim, fs.StabilityConfig()
            )

    def test_set_order_invariance(self, demo_sim, rng):
        config = fs.StabilityConfig(
            theta=0.9, expectation_mode=MONTE_CARLO, mc_samples=300, rng_seed=11
        )
        sets = tuple(random_feature_set(rng, demo_sim.universe) for _ in range(5))
        forward = fs.SelectionEnsemble(demo_sim.universe, sets)
        backward = fs.SelectionEnsemble(demo_sim.universe, tuple(reversed(sets)))
        for kind in ALL_MEASURES:
            a = fs.compute_measure(kind, forward, demo_sim, config).value
            b = fs.compute_measure(kind, backward, demo_sim, config).value
            assert a == b

    def test_universe_storage_order_invariance(self, demo_sim, rng):
        # same feature names, permuted storage order, matrix permuted to match
        perm = rng.permutation(7)
        ids = tuple(demo_sim.universe.ids[k] for k in perm)
        universe = fs.FeatureUniverse(ids)
        values = demo_sim.values[np.ix_(perm, perm)]
        permuted = fs.validate_similarity_matrix(values, universe)
        config = fs.StabilityConfig(theta=0.9, expectation_mode=EXACT)
        sets = tuple(random_feature_set(rng, demo_sim.universe, k=3) for _ in range(4))
        base = fs.SelectionEnsemble(demo_sim.universe, sets)
        moved = fs.SelectionEnsemble(universe, sets)
        for kind in ALL_MEASURES:
            a = fs.compute_measure(kind, base, demo_sim, config).value
            b = fs.compute_measure(kind, moved, permuted, config).value
            assert a == pytest.approx(b, abs=1e-12)


class TestExhaustiveOracleAgreement:
    """Straight-from-formula reimplementation checked over every one of the
    2^7 * 2^7 subset combinations of the demo matrix."""

    def test_all_combinations(self, demo_sim):
        theta = 0.9
        ids = demo_sim.universe.ids
        table = oracle.sim_lookup(ids, demo_sim.values)
        config = fs.StabilityConfig(theta=theta, expectation_mode=EXACT)
        cache = fs.ExpectationCache()
        oracle_expectations = {}

        def oracle_e(kind, k1, k2):
            key = (kind, min(k1, k2), max(k1, k2))
            if key not in oracle_expectations:
                oracle_expectations[key] = oracle.exact_expectation(
                    kind, key[1], key[2], ids, table, theta
                )
            return oracle_expectations[key]

        subsets = [
            frozenset(ids[k] for k in range(7) if mask >> k & 1)
            for mask in range(128)
        ]
        checked = 0
        for sa in subsets:
            for sb in subsets:
                vi, vj = fs.FeatureSet(sa), fs.FeatureSet(sb)
                expected = {
                    "SMU": oracle.smu(sa, sb, 7),
                    "SMZ": oracle.smz(sa, sb, table, theta),
                    "SMY": oracle.smy(
                        sa, sb, table, theta,
                        oracle_e("sym_count", len(sa), len(sb)),
                    ),
                    "SMA-Count": oracle.sma(
                        "count", sa, sb, table, theta,
                        oracle_e("count", len(sa), len(sb)),
                    ),
                    "SMA-Mean": oracle.sma(
                        "mean", sa, sb, table, theta,
                        oracle_e("mean", len(sa), len(sb)),
                    ),
                    "SMA-Greedy": oracle.sma(
                        "greedy", sa, sb, table, theta,
                        oracle_e("greedy", len(sa), len(sb)),
                    ),
                    "SMA-MBM": oracle.sma(
                        "mbm", sa, sb, table, theta,
                        oracle_e("mbm", len(sa), len(sb)),
                    ),
                }
                for kind in ALL_MEASURES:
                    got = pairwise_score(kind, vi, vj, demo_sim, config, cache, 7)
                    want = expected[kind.value]
                    if want is None:
                        assert got.value is None, (sa, sb, kind)
                    else:
                        assert got.value == pytest.approx(want, abs=1e-12), (
                            sa,
                            sb,
                            kind,
                        )
                checked += 1
        assert checked == 16_384
