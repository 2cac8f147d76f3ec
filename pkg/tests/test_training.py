import json

import numpy as np
import pytest

from lsdc.baselines import kmeans
from lsdc.composition import BetaParams, mixup_compose
from lsdc.data import (
    FeatureMatrix,
    LabelVector,
    RngState,
    gen_blobs,
    gen_two_moons,
    ring_centers,
)
from lsdc.errors import ConfigError, DataError
from lsdc.evaluation import clustering_accuracy, confident_accuracy
from lsdc.losses import clustering_loss, pair_agreement
from lsdc.model import init_head
from lsdc.pairwise import SimilarityConfig, build_adjacency
from lsdc.training import (
    AdamOptimiser,
    RunConfig,
    SGDMomentumOptimiser,
    Trainer,
    adam_step,
    lr_at,
    make_optimiser,
    sgd_step,
    steps_per_epoch,
    train,
)

BLOBS_SIMILARITY = SimilarityConfig(kind="cosine", tau=0.9)


def _blobs_config(**overrides):
    settings = dict(
        similarity=BLOBS_SIMILARITY,
        k_clusters=4,
        epochs=3,
        batch_size=64,
        ramp_len_epochs=2,
        seed=3,
    )
    settings.update(overrides)
    return RunConfig(**settings)


def _param(value):
    return {"w": np.array([float(v) for v in np.atleast_1d(value)])}


@pytest.mark.parametrize(
    ("overrides", "key"),
    [
        (dict(k_clusters=1), "k_clusters"),
        (dict(similarity=SimilarityConfig(kind="knn", k=300)), "similarity.k"),
        (dict(lr_steps=(180, 140), epochs=200), "lr_steps"),
        (dict(momentum=1.0), "momentum"),
        (dict(optimizer="rmsprop"), "optimizer"),
        (dict(composition="cutmix"), "composition"),
        (dict(augment_mode="feature_dropout", augment_strength=1.0), "augment.strength"),
        (dict(lambda_=-1.0), "lambda"),
        (dict(batch_size=1), "batch_size"),
        (dict(head_kind="conv"), "head.kind"),
    ],
)
def test_config_errors_name_the_key(overrides, key):
    with pytest.raises(ConfigError) as info:
        RunConfig(**overrides)
    assert info.value.key == key


def test_weight_decay_defaults():
    assert RunConfig().effective_weight_decay == 5e-4
    assert RunConfig(composition="mixup").effective_weight_decay == 1e-4
    assert RunConfig(composition="ricap", weight_decay=0.0).effective_weight_decay == 0.0


def test_step_schedule():
    cfg = RunConfig(epochs=220, lr_init=0.1, lr_steps=(140, 180))
    assert lr_at(cfg, 0) == pytest.approx(0.1)
    assert lr_at(cfg, 139) == pytest.approx(0.1)
    assert lr_at(cfg, 140) == pytest.approx(0.01)
    assert lr_at(cfg, 150) == pytest.approx(0.01)
    assert lr_at(cfg, 200) == pytest.approx(0.001)
    flat = RunConfig(epochs=10)
    assert {lr_at(flat, e) for e in range(10)} == {0.1}


def test_sgd_examples():
    params, _ = sgd_step(_param(1), _param(2), None, 0.1, 0.0, 0.0)
    assert params["w"][0] == pytest.approx(0.8)

    state = None
    params = _param(0)
    trace = []
    for _ in range(2):
        params, state = sgd_step(params, _param(1), state, 0.1, 0.9, 0.0)
        trace.append((state.buffers["velocity"]["w"][0], params["w"][0]))
    assert trace[0] == pytest.approx((1.0, -0.1))
    assert trace[1] == pytest.approx((1.9, -0.29))

    params, _ = sgd_step(_param(2), _param(0), None, 0.1, 0.0, 0.5)
    assert params["w"][0] == pytest.approx(1.9)


def test_sgd_does_not_mutate_inputs():
    params, grads = _param([1, 2]), _param([3, 4])
    _, state = sgd_step(params, grads, None, 0.1, 0.9, 0.0)
    before = state.copy()
    sgd_step(params, grads, state, 0.1, 0.9, 0.0)
    np.testing.assert_array_equal(params["w"], [1.0, 2.0])
    np.testing.assert_array_equal(state.buffers["velocity"]["w"], before.buffers["velocity"]["w"])


def test_adam_first_step_moves_by_lr():
    params, state = adam_step(_param([1, -1]), _param([0.3, -20]), None, 0.01)
    np.testing.assert_allclose(params["w"], [1 - 0.01, -1 + 0.01], rtol=1e-6)
    assert state.step == 1


@pytest.mark.parametrize("optimiser", [SGDMomentumOptimiser(0.9), AdamOptimiser()])
def test_zero_gradient_leaves_params(optimiser):
    params = _param([0.5, -2.0])
    for _ in range(3):
        params = optimiser.step(params, _param([0, 0]), 0.1)
    np.testing.assert_array_equal(params["w"], [0.5, -2.0])


def test_optimiser_steps_are_deterministic():
    _, state = adam_step(_param([1, 2]), _param([1, 1]), None, 0.1)
    first = adam_step(_param([1, 2]), _param([0.5, -1]), state.copy(), 0.1)
    second = adam_step(_param([1, 2]), _param([0.5, -1]), state.copy(), 0.1)
    np.testing.assert_array_equal(first[0]["w"], second[0]["w"])


def test_mismatched_gradients():
    with pytest.raises(DataError):
        sgd_step(_param([1, 2]), {"v": np.zeros(2)}, None, 0.1, 0.9, 0.0)


def test_make_optimiser():
    assert isinstance(make_optimiser(RunConfig()), SGDMomentumOptimiser)
    adam = make_optimiser(RunConfig(optimizer="adam", weight_decay=2e-3))
    assert isinstance(adam, AdamOptimiser)
    assert adam.weight_decay == 2e-3


@pytest.mark.parametrize(
    ("n", "batch", "min_batch", "expected"),
    [(1000, 256, 2, 4), (513, 256, 2, 2), (200, 256, 2, 1), (10, 256, 11, 0)],
)
def test_steps_per_epoch(n, batch, min_batch, expected):
    assert steps_per_epoch(n, batch, min_batch) == expected


def test_report_records(blobs, tmp_path):
    features, labels = blobs
    path = tmp_path / "report.jsonl"
    report = train(features, _blobs_config(report_path=str(path)), labels)
    assert len(report.records) == 3
    assert all(r.n_steps == 4 for r in report.records)
    assert len(report.omega_trace) == len(report.step_losses) == 12
    assert list(report.omega_trace) == sorted(report.omega_trace)
    lines = path.read_text().splitlines()
    assert lines == report.lines()
    first = json.loads(lines[0])
    assert set(first) == {
        "epoch",
        "lr",
        "omega",
        "loss_clus",
        "loss_cons",
        "loss_total",
        "n_steps",
        "n_edges",
        "acc",
    }
    assert 0.0 <= first["acc"] <= 1.0
    assert report.predict(features).shape == (200, 4)


def test_report_without_labels_omits_accuracy(blobs):
    features, _ = blobs
    report = train(features, _blobs_config(epochs=1))
    assert "acc" not in json.loads(report.lines()[0])
    assert report.final_acc is None


def test_training_is_deterministic(blobs):
    features, labels = blobs
    cfg = _blobs_config(composition="mixup")
    assert train(features, cfg, labels).lines() == train(features, cfg, labels).lines()


def test_disabled_consistency_matches_zero_lambda(blobs):
    features, labels = blobs
    off = train(features, _blobs_config(mse_enabled=False), labels)
    zero = train(features, _blobs_config(lambda_=0.0), labels)
    for a, b in zip(off.records, zero.records):
        assert (a.loss_clus, a.loss_cons, a.loss_total) == (b.loss_clus, b.loss_cons, b.loss_total)
    assert all(r.loss_cons == 0.0 for r in off.records)
    assert all(r.loss_total == r.loss_clus for r in off.records)


def test_labeling_space_changes_the_run(blobs):
    features, _ = blobs
    feature_space = train(features, _blobs_config(similarity=SimilarityConfig(kind="knn", k=5)))
    logit_space = train(
        features,
        _blobs_config(similarity=SimilarityConfig(kind="knn", k=5, space="logit")),
    )
    assert feature_space.lines() != logit_space.lines()


def test_clustering_loss_falls_early(blobs):
    features, _ = blobs
    report = train(features, _blobs_config(epochs=5, mse_enabled=False))
    assert report.records[-1].loss_clus < 0.9 * report.step_losses[0]


@pytest.mark.parametrize(
    "overrides",
    [
        dict(head_kind="two_layer", head_hidden=16),
        dict(optimizer="adam", lr_init=0.01),
        dict(composition="ricap"),
        dict(backbone_hidden=8, backbone_out_dim=3),
        dict(dtype="float32"),
        dict(augment_mode="feature_dropout", augment_strength=0.1),
        dict(similarity=SimilarityConfig(kind="knn", k=5), lr_steps=(1,)),
    ],
)
def test_run_variants(blobs, overrides):
    features, labels = blobs
    report = train(features, _blobs_config(**overrides), labels)
    assert all(np.isfinite(r.loss_total) for r in report.records)
    probs = report.predict(features)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, rtol=1e-5)


def test_single_precision_run_stays_single(blobs):
    features, labels = blobs
    report = train(features, _blobs_config(dtype="float32", backbone_hidden=4), labels)
    assert report.head.dtype == np.float32
    assert report.backbone.dtype == np.float32


def test_external_plan(blobs):
    features, labels = blobs
    calls = []

    def plan_fn(batch, rng):
        calls.append(batch.shape[0])
        return mixup_compose(batch, rng, BetaParams(), mix_weight=0.7)

    train(features, _blobs_config(composition="external_plan", epochs=1), labels, plan_fn)
    assert calls == [64, 64, 64, 8]
    with pytest.raises(ConfigError):
        Trainer(features, _blobs_config(composition="external_plan"))


def test_trainer_input_errors(blobs):
    features, labels = blobs
    with pytest.raises(DataError):
        Trainer(FeatureMatrix(features.data[:30]), _blobs_config(), labels)
    with pytest.raises(DataError):
        Trainer(FeatureMatrix(np.zeros((5, 2))), RunConfig(similarity=SimilarityConfig(k=10)))


def test_disabled_consistency_changes_the_run(blobs):
    features, labels = blobs
    default = train(features, _blobs_config(augment_strength=0.05), labels)
    off = train(features, _blobs_config(augment_strength=0.05, mse_enabled=False), labels)
    assert any(r.loss_cons > 0.0 for r in default.records)
    assert default.lines() != off.lines()


def test_diagonal_pairs_raise_self_agreement():
    x = np.eye(2)
    head = init_head("linear", 2, 0, 2, RngState(0))
    head.set_params({"W": np.diag([0.3, 0.3]), "b": np.zeros(2)})
    diagonals = []
    for _ in range(10):
        _, p = head.forward(x)
        diagonals.append(np.diag(pair_agreement(p, p)))
        loss = clustering_loss(p, p, np.eye(2))
        grads = head.backward(x, loss.grad_p + loss.grad_p_prime).params
        head.set_params(sgd_step(head.params, grads, None, 0.5, 0.0, 0.0)[0])
    assert (np.diff(np.array(diagonals), axis=0) > 0).all()


def _ring_blobs(seed):
    return gen_blobs(50, ring_centers(4, 3.0), 0.15, RngState(seed))


def _angular_blobs(seed, n_per_cluster=100):
    """Return four thin rays 30 degrees apart, rotated by a seeded angle.

    Gaussian blobs in (angle, radius) coordinates mapped through the polar
    map: neighbours in angle share a cluster, while the long radial spread
    makes k-means prefer radial bands.
    """
    gen = RngState(seed).generator
    offset = gen.uniform(0.0, 2.0 * np.pi)
    centres = offset + np.deg2rad([0.0, 30.0, 60.0, 90.0])
    labels = np.repeat(np.arange(4), n_per_cluster)
    theta = centres[labels] + gen.normal(scale=np.deg2rad(2.0), size=labels.size)
    radius = gen.uniform(0.3, 3.0, size=labels.size)
    x = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    return FeatureMatrix(x), LabelVector(labels)


def test_angular_blobs_generator():
    features, labels = _angular_blobs(0, n_per_cluster=20)
    assert features.data.shape == (80, 2)
    cfg = SimilarityConfig(kind="cosine", tau=float(np.cos(np.deg2rad(10.0))))
    a = build_adjacency(cfg, features.data)
    same = labels.labels[:, None] == labels.labels[None, :]
    assert not a.a[~same].any()


@pytest.mark.slow
def test_separable_blobs_are_recovered():
    cfg_args = dict(epochs=30, batch_size=128, ramp_len_epochs=10)
    for seed in range(10):
        features, labels = _ring_blobs(seed)
        report = train(features, _blobs_config(seed=seed, **cfg_args), labels)
        assert report.final_acc == 1.0, seed
        subset_acc, n_confident = confident_accuracy(report.predict(features), labels)
        assert n_confident > 0
        assert subset_acc >= report.final_acc
        baseline = kmeans(features, 4, rng=RngState(seed))
        assert clustering_accuracy(baseline.assignments, labels, 4)[0] == 1.0


@pytest.mark.slow
def test_entangled_blobs_beat_kmeans_on_raw_coordinates():
    cfg_args = dict(
        similarity=SimilarityConfig(kind="cosine", tau=float(np.cos(np.deg2rad(10.0)))),
        epochs=40,
        batch_size=100,
        ramp_len_epochs=10,
    )
    lsdc_accs, kmeans_accs = [], []
    for seed in range(5):
        features, labels = _angular_blobs(seed)
        report = train(features, _blobs_config(seed=seed, **cfg_args), labels)
        lsdc_accs.append(report.final_acc)
        baseline = kmeans(features, 4, rng=RngState(seed))
        kmeans_accs.append(clustering_accuracy(baseline.assignments, labels, 4)[0])
    assert np.mean(lsdc_accs) >= np.mean(kmeans_accs) + 0.05


MOONS_ARGS = dict(
    similarity=SimilarityConfig(kind="knn", k=10),
    k_clusters=2,
    epochs=100,
    batch_size=256,
    lambda_=5.0,
    ramp_len_epochs=50,
    composition="mixup",
    backbone_hidden=16,
)


@pytest.mark.slow
def test_two_moons_run_is_reproducible():
    features, labels = gen_two_moons(1000, 0.05, RngState(0))
    cfg = RunConfig(seed=0, **MOONS_ARGS)
    first = train(features, cfg, labels)
    assert first.lines() == train(features, cfg, labels).lines()
    assert 0.5 <= first.final_acc <= 1.0


@pytest.mark.slow
@pytest.mark.xfail(
    strict=True,
    reason="a K=2 kNN pairwise objective scores about 0.6 on two moons, see DESIGN.md",
)
def test_two_moons_with_backbone():
    accs = []
    for seed in range(10):
        features, labels = gen_two_moons(1000, 0.05, RngState(seed))
        accs.append(train(features, RunConfig(seed=seed, **MOONS_ARGS), labels).final_acc)
    assert np.mean(accs) >= 0.95
    assert min(accs) >= 0.9
