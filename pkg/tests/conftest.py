import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import featstab as fs

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def make_universe(p, prefix="f"):
    return fs.FeatureUniverse(tuple(f"{prefix}{k}" for k in range(p)))


def random_similarity(rng, p, prefix="f", palette=None, edge_prob=0.35):
    """Random valid similarity matrix; a palette forces tied values."""
    universe = make_universe(p, prefix)
    values = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < edge_prob:
                s = float(rng.choice(palette)) if palette is not None else float(rng.uniform(0.85, 1.0))
            else:
                s = float(rng.uniform(0.0, 0.8))
            values[i, j] = values[j, i] = s
    return fs.validate_similarity_matrix(values, universe)


def random_feature_set(rng, universe, k=None):
    p = universe.p
    if k is None:
        k = int(rng.integers(0, p + 1))
    members = rng.choice(p, size=k, replace=False) if k else []
    return fs.FeatureSet.of(universe.ids[int(m)] for m in members)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
