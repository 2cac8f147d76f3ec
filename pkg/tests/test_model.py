import numpy as np
import pytest

from lsdc._testing import assert_gradient_close, central_difference
from lsdc.data import RngState
from lsdc.errors import DataError
from lsdc.model import (
    LinearHead,
    TwoLayerHead,
    backward,
    forward,
    init_backbone,
    init_head,
    load_checkpoint,
    save_checkpoint,
    softmax,
)


def test_init_head_is_deterministic():
    a = init_head("linear", 2, 0, 2, RngState(5))
    b = init_head("linear", 2, 0, 2, RngState(5))
    np.testing.assert_array_equal(a.params["W"], b.params["W"])
    np.testing.assert_array_equal(a.params["b"], np.zeros(2))


def test_two_layer_shapes():
    head = init_head("two_layer", 3, 64, 4, RngState(0))
    assert isinstance(head, TwoLayerHead)
    assert {k: v.shape for k, v in head.params.items()} == {
        "W1": (3, 64),
        "b1": (64,),
        "W": (64, 4),
        "b": (4,),
    }


def test_init_weight_scale():
    head = init_head("linear", 25, 0, 400, RngState(1))
    assert abs(head.params["W"].std() - 1 / 5) < 0.2 / 5


def test_zero_head_is_uniform():
    head = LinearHead({"W": np.zeros((3, 4)), "b": np.zeros(4)})
    _, probs = forward(head, np.ones((2, 3)))
    np.testing.assert_allclose(probs, 0.25)


def test_softmax_analytic_and_shift_invariant():
    np.testing.assert_allclose(softmax(np.array([[np.log(3.0), 0.0]])), [[0.75, 0.25]])
    logits = np.array([[1.0, 2.0, -1.0]])
    np.testing.assert_allclose(softmax(logits + 100.0), softmax(logits))


def test_rows_sum_to_one(np_rng):
    head = init_head("two_layer", 4, 8, 3, RngState(2))
    _, probs = forward(head, np_rng.normal(size=(6, 4)))
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)


def test_dimension_mismatch():
    head = init_head("linear", 3, 0, 2, RngState(0))
    with pytest.raises(DataError):
        forward(head, np.ones((2, 4)))


def test_zero_upstream_gives_zero_gradients(np_rng):
    head = init_head("two_layer", 2, 5, 2, RngState(3))
    grads = backward(head, np_rng.normal(size=(3, 2)), np.zeros((3, 2)))
    for value in grads.params.values():
        np.testing.assert_array_equal(value, 0.0)


@pytest.mark.parametrize("kind", ["linear", "two_layer"])
def test_head_gradients_match_finite_differences(kind, np_rng):
    head = init_head(kind, 2, 4, 2, RngState(4))
    x = np_rng.normal(size=(3, 2))
    weights = np_rng.normal(size=(3, 2))
    grads = backward(head, x, weights)
    for name, value in head.params.items():

        def fn(v, n=name):
            trial = head.params
            trial[n] = v
            return float((type(head)(trial).forward(x)[1] * weights).sum())

        assert_gradient_close(grads.params[name], central_difference(fn, value))
    numeric_x = central_difference(lambda v: float((head.forward(v)[1] * weights).sum()), x)
    assert_gradient_close(grads.inputs, numeric_x)


def test_dead_relu_unit_has_zero_incoming_gradient(np_rng):
    head = init_head("two_layer", 2, 3, 2, RngState(6))
    params = head.params
    params["W1"] = params["W1"].copy()
    params["b1"] = params["b1"].copy()
    params["W1"][:, 0] = 0.0
    params["b1"][0] = -1.0
    head.set_params(params)
    grads = backward(head, np_rng.normal(size=(4, 2)), np_rng.normal(size=(4, 2)))
    np.testing.assert_array_equal(grads.params["W1"][:, 0], 0.0)
    assert grads.params["b1"][0] == 0.0


def test_backbone_gradients_match_finite_differences(np_rng):
    backbone = init_backbone(3, 5, 2, RngState(8))
    x = np_rng.normal(size=(4, 3))
    upstream = np_rng.normal(size=(4, 2))
    grads = backbone.backward(x, upstream)
    for name, value in backbone.params.items():

        def fn(v, n=name):
            trial = backbone.params
            trial[n] = v
            return float((type(backbone)(trial).forward(x) * upstream).sum())

        assert_gradient_close(grads.params[name], central_difference(fn, value))


def test_set_params_rejects_shape_change():
    head = init_head("linear", 3, 0, 2, RngState(0))
    before = head.params
    with pytest.raises(DataError):
        head.set_params({"W": np.zeros((2, 2)), "b": np.zeros(2)})
    with pytest.raises(DataError):
        head.set_params({"W": np.zeros((5, 7)), "b": np.zeros(7)})
    assert (head.in_dim, head.out_dim) == (3, 2)
    np.testing.assert_array_equal(head.params["W"], before["W"])

    mlp = init_head("two_layer", 3, 4, 2, RngState(0))
    wider = {
        name: np.zeros(value.shape[:-1] + (value.shape[-1] + 1,))
        for name, value in mlp.params.items()
    }
    with pytest.raises(DataError):
        mlp.set_params(wider)
    mlp.set_params({name: np.zeros_like(value) for name, value in mlp.params.items()})
    assert mlp.out_dim == 2


@pytest.mark.parametrize("with_backbone", [False, True])
def test_checkpoint_round_trip(tmp_path, with_backbone):
    backbone = init_backbone(3, 4, 3, RngState(1)) if with_backbone else None
    head = init_head("two_layer", 3, 6, 2, RngState(2))
    path = tmp_path / "head.lsdh"
    save_checkpoint(path, head, backbone)
    loaded, loaded_backbone = load_checkpoint(path)
    assert isinstance(loaded, TwoLayerHead)
    for name, value in head.params.items():
        np.testing.assert_allclose(loaded.params[name], value, rtol=1e-6)
    assert (loaded_backbone is None) == (backbone is None)


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "bad.lsdh"
    path.write_bytes(b"LSDC" + bytes(16))
    with pytest.raises(DataError):
        load_checkpoint(path)
