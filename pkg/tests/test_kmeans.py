import itertools

import numpy as np
import pytest

from lsdc.baselines import kmeans
from lsdc.data import FeatureMatrix, RngState, gen_blobs
from lsdc.errors import ConfigError
from lsdc.evaluation import clustering_accuracy


def _best_inertia(x, n_clusters):
    best = np.inf
    for labels in itertools.product(range(n_clusters), repeat=x.shape[0]):
        labels = np.asarray(labels)
        total = 0.0
        for c in np.unique(labels):
            members = x[labels == c]
            total += float(((members - members.mean(axis=0)) ** 2).sum())
        best = min(best, total)
    return best


def test_two_points():
    model = kmeans(FeatureMatrix(np.array([[0.0, 0.0], [4.0, 0.0]])), 1)
    np.testing.assert_allclose(model.centroids, [[2.0, 0.0]])
    assert model.inertia == pytest.approx(8.0)


def test_two_points_two_clusters():
    x = np.array([[0.0, 0.0], [4.0, 0.0]])
    model = kmeans(FeatureMatrix(x), 2, rng=RngState(0))
    np.testing.assert_allclose(model.centroids[model.assignments], x)
    assert model.assignments[0] != model.assignments[1]
    assert model.inertia == 0.0


def test_two_far_pairs():
    x = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    model = kmeans(FeatureMatrix(x), 2)
    assert model.assignments[0] == model.assignments[1]
    assert model.assignments[2] == model.assignments[3]
    assert model.assignments[0] != model.assignments[2]
    assert model.inertia == pytest.approx(1.0)


def test_separable_blobs(blobs):
    features, labels = blobs
    model = kmeans(features, 4, rng=RngState(1))
    acc, _ = clustering_accuracy(model.assignments, labels, 4)
    assert acc == 1.0
    np.testing.assert_array_equal(model.predict(features), model.assignments)


def test_inertia_matches_exhaustive_search():
    centers = [[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]]
    features, labels = gen_blobs(3, centers, 0.1, RngState(2))
    model = kmeans(features, 3, rng=RngState(4))
    assert clustering_accuracy(model.assignments, labels, 3)[0] == 1.0
    assert model.inertia == pytest.approx(_best_inertia(features.data, 3))


def test_inertia_never_increases(np_rng):
    features = FeatureMatrix(np_rng.normal(size=(300, 3)))
    trace = kmeans(features, 6, rng=RngState(9)).inertia_trace
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_fixed_seed_is_reproducible(np_rng):
    features = FeatureMatrix(np_rng.normal(size=(100, 2)))
    first = kmeans(features, 5, rng=RngState(3))
    second = kmeans(features, 5, rng=RngState(3))
    np.testing.assert_array_equal(first.centroids, second.centroids)
    assert first.inertia_trace == second.inertia_trace


@pytest.mark.parametrize("n_clusters", [0, 4])
def test_cluster_count_out_of_range(n_clusters):
    with pytest.raises(ConfigError):
        kmeans(FeatureMatrix(np.zeros((3, 2))), n_clusters)
