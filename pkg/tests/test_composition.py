import numpy as np
import pytest

from lsdc._testing import (
    assert_gradient_close,
    central_difference,
    loop_composite_targets,
    random_probs,
)
from lsdc.composition import (
    BetaParams,
    CompositePlan,
    composite_clustering_loss,
    composite_targets,
    mixup_compose,
    ricap_compose,
    sample_beta,
)
from lsdc.data import RngState
from lsdc.errors import ConfigError, DataError
from lsdc.pairwise import AdjacencyMatrix


def _random_adjacency(np_rng, size):
    upper = np.triu(np_rng.uniform(size=(size, size)) > 0.6, 1)
    return AdjacencyMatrix(upper | upper.T | np.eye(size, dtype=bool))


def test_four_way_composite_target():
    size = 4
    features = np.arange(8, dtype=float).reshape(size, 2)
    perms = tuple(np.roll(np.arange(size), -shift) for shift in range(4))
    weights = np.array([0.7, 0.1, 0.1, 0.1])
    combined = sum(w * features[p] for w, p in zip(weights, perms))
    plan = CompositePlan(perms, weights, combined)
    t = composite_targets(AdjacencyMatrix(np.eye(size, dtype=bool)), plan).t
    np.testing.assert_allclose(np.diag(t), 0.7)
    np.testing.assert_allclose(t[~np.eye(size, dtype=bool)], 0.1)


def test_identity_plan_gives_adjacency(np_rng):
    adjacency = _random_adjacency(np_rng, 7)
    plan = CompositePlan.identity(np_rng.normal(size=(7, 3)))
    np.testing.assert_array_equal(composite_targets(adjacency, plan).t, adjacency.as_float())


def test_targets_match_loop_oracle(np_rng):
    rng = RngState(3)
    for _ in range(20):
        size = int(np_rng.integers(2, 10))
        adjacency = _random_adjacency(np_rng, size)
        plan = ricap_compose(np_rng.normal(size=(size, 2)), rng, BetaParams())
        expected = loop_composite_targets(adjacency.as_float(), list(plan.perms), plan.weights)
        np.testing.assert_allclose(composite_targets(adjacency, plan).t, expected, atol=1e-12)


def test_mixup_with_full_weight_is_the_raw_batch(np_rng, rng):
    features = np_rng.normal(size=(5, 3))
    adjacency = _random_adjacency(np_rng, 5)
    plan = mixup_compose(features, rng, BetaParams(), mix_weight=1.0)
    np.testing.assert_array_equal(plan.composite_features, features)
    np.testing.assert_array_equal(composite_targets(adjacency, plan).t, adjacency.as_float())


def test_mixup_half_weight_with_swap(rng):
    features = np.array([[0.0, 2.0], [4.0, 0.0]])
    plan = mixup_compose(features, rng, BetaParams(), mix_weight=0.5, permutation=[1, 0])
    np.testing.assert_allclose(plan.composite_features, [[2.0, 1.0], [2.0, 1.0]])
    t = composite_targets(AdjacencyMatrix(np.eye(2, dtype=bool)), plan).t
    np.testing.assert_allclose(t, 0.5)


def test_mixup_random_plan_recomputes(np_rng, rng):
    features = np_rng.normal(size=(6, 4))
    plan = mixup_compose(features, rng, BetaParams())
    m = plan.weights[0]
    expected = m * features + (1 - m) * features[plan.perms[1]]
    np.testing.assert_allclose(plan.composite_features, expected)
    np.testing.assert_array_equal(plan.perms[0], np.arange(6))


def test_mixup_is_deterministic(np_rng):
    features = np_rng.normal(size=(6, 4))
    first = mixup_compose(features, RngState(11), BetaParams())
    second = mixup_compose(features, RngState(11), BetaParams())
    np.testing.assert_array_equal(first.composite_features, second.composite_features)


def test_uniform_beta_mean():
    rng = RngState(5)
    draws = np.array([sample_beta(BetaParams(1.0, 1.0), rng) for _ in range(100_000)])
    assert 0.49 <= draws.mean() <= 0.51


def test_default_beta_is_u_shaped():
    rng = RngState(6)
    draws = np.array([sample_beta(BetaParams(), rng) for _ in range(100_000)])
    assert 0.48 <= draws.mean() <= 0.52
    assert ((draws < 0.2) | (draws > 0.8)).mean() >= 0.6


def test_ricap_weights(np_rng, rng):
    plan = ricap_compose(np_rng.normal(size=(8, 2)), rng, BetaParams())
    assert plan.n_perms == 4
    assert plan.weights.sum() == pytest.approx(1.0)
    np.testing.assert_array_equal(plan.perms[0], np.arange(8))
    fixed = ricap_compose(np_rng.normal(size=(8, 2)), rng, BetaParams(), corner=(0.5, 0.25))
    np.testing.assert_allclose(fixed.weights, [0.125, 0.125, 0.375, 0.375])


def test_composite_loss_gradients(np_rng, rng):
    size, k = 6, 3
    features = np_rng.normal(size=(size, 2))
    adjacency = _random_adjacency(np_rng, size)
    plan = ricap_compose(features, rng, BetaParams())
    p, q = random_probs(np_rng, size, k), random_probs(np_rng, size, k)
    result = composite_clustering_loss(p, q, adjacency, plan)
    assert_gradient_close(
        result.grad_p,
        central_difference(lambda v: composite_clustering_loss(v, q, adjacency, plan).value, p),
    )
    assert_gradient_close(
        result.grad_p_prime,
        central_difference(lambda v: composite_clustering_loss(p, v, adjacency, plan).value, q),
    )


def test_plan_validation():
    features = np.zeros((3, 2))
    identity = np.arange(3)
    with pytest.raises(DataError):
        CompositePlan((identity, identity), np.array([0.5, 0.4]), features)
    with pytest.raises(DataError):
        CompositePlan((np.array([0, 0, 1]),), np.ones(1), features)
    with pytest.raises(DataError):
        CompositePlan((identity,), np.ones(1), np.zeros((2, 2)))
    with pytest.raises(DataError):
        composite_targets(AdjacencyMatrix(np.eye(2, dtype=bool)), CompositePlan.identity(features))


def test_composition_config_errors(rng):
    with pytest.raises(ConfigError):
        BetaParams(0.0, 1.0)
    with pytest.raises(ConfigError):
        mixup_compose(np.zeros((1, 2)), rng, BetaParams())
    with pytest.raises(ConfigError):
        ricap_compose(np.zeros((1, 2)), rng, BetaParams())
