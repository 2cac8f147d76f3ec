"""Linear and two-layer classifier heads and the trainable mini-backbone."""

from __future__ import annotations

from typing import Literal

import numpy as np

from lsdc._types import FloatArray, ParamDict
from lsdc.data.rng import RngState
from lsdc.errors import ConfigError
from lsdc.model._base_head import ClassifierHead, HeadGradients, TrainableBlock

HeadKind = Literal["linear", "two_layer"]
HEAD_KINDS: tuple[str, ...] = ("linear", "two_layer")
DEFAULT_HIDDEN = 128


def _mlp_forward(
    x: FloatArray, params: ParamDict
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Return the hidden pre-activation, the ReLU hidden layer and the output."""
    z1 = x @ params["W1"] + params["b1"]
    h = np.maximum(z1, 0.0)
    return z1, h, h @ params["W"] + params["b"]


def _mlp_backward(
    x: FloatArray, params: ParamDict, grad_out: FloatArray
) -> HeadGradients:
    z1, h, _ = _mlp_forward(x, params)
    grad_h = grad_out @ params["W"].T
    grad_z1 = grad_h * (z1 > 0)
    grads = {
        "W1": x.T @ grad_z1,
        "b1": grad_z1.sum(axis=0),
        "W": h.T @ grad_out,
        "b": grad_out.sum(axis=0),
    }
    return HeadGradients(grads, grad_z1 @ params["W1"].T)


def _mlp_shapes(params: ParamDict) -> dict[str, tuple[int, ...]]:
    d, hidden = params["W1"].shape
    k = params["W"].shape[1]
    return {"W1": (d, hidden), "b1": (hidden,), "W": (hidden, k), "b": (k,)}


class LinearHead(ClassifierHead):
    """Linear layer followed by softmax.

    Args:
    ----
        params (ParamDict): W of shape (D, K) and b of shape (K,).

    """

    kind = "linear"

    @property
    def param_names(self) -> tuple[str, ...]:
        """Return the parameter names in serialisation order."""
        return ("W", "b")

    @property
    def in_dim(self) -> int:
        """Return the feature dimension D."""
        return int(self._params["W"].shape[0])

    @property
    def out_dim(self) -> int:
        """Return the number of clusters K."""
        return int(self._params["W"].shape[1])

    def _expected_shapes(self, params: ParamDict) -> dict[str, tuple[int, ...]]:
        d, k = params["W"].shape
        return {"W": (d, k), "b": (k,)}

    def logits(self, features: FloatArray) -> FloatArray:
        """Return features @ W + b."""
        return features @ self._params["W"] + self._params["b"]

    def _backward_logits(self, features: FloatArray, grad_logits: FloatArray) -> HeadGradients:
        grads = {"W": features.T @ grad_logits, "b": grad_logits.sum(axis=0)}
        return HeadGradients(grads, grad_logits @ self._params["W"].T)


class TwoLayerHead(ClassifierHead):
    """Two-layer classifier: affine, ReLU, affine, softmax.

    Separates clusters non-linearly in the feature space.

    Args:
    ----
        params (ParamDict): W1 (D, H), b1 (H,), W (H, K) and b (K,).

    """

    kind = "two_layer"

    @property
    def param_names(self) -> tuple[str, ...]:
        """Return the parameter names in serialisation order."""
        return ("W1", "b1", "W", "b")

    @property
    def in_dim(self) -> int:
        """Return the feature dimension D."""
        return int(self._params["W1"].shape[0])

    @property
    def hidden_dim(self) -> int:
        """Return the hidden width H."""
        return int(self._params["W1"].shape[1])

    @property
    def out_dim(self) -> int:
        """Return the number of clusters K."""
        return int(self._params["W"].shape[1])

    def _expected_shapes(self, params: ParamDict) -> dict[str, tuple[int, ...]]:
        return _mlp_shapes(params)

    def logits(self, features: FloatArray) -> FloatArray:
        """Return the output of the two affine layers."""
        return _mlp_forward(features, self._params)[2]

    def _backward_logits(self, features: FloatArray, grad_logits: FloatArray) -> HeadGradients:
        return _mlp_backward(features, self._params, grad_logits)


class MLPBackbone(TrainableBlock):
    """Trainable two-layer feature producer placed in front of the head.

    Its output defines the feature space where the adjacency is built, so that
    space evolves during training.

    Args:
    ----
        params (ParamDict): W1 (D, H), b1 (H,), W (H, D_out) and b (D_out,).

    """

    kind = "backbone"

    @property
    def param_names(self) -> tuple[str, ...]:
        """Return the parameter names in serialisation order."""
        return ("W1", "b1", "W", "b")

    @property
    def in_dim(self) -> int:
        """Return the input dimension D."""
        return int(self._params["W1"].shape[0])

    @property
    def hidden_dim(self) -> int:
        """Return the hidden width H."""
        return int(self._params["W1"].shape[1])

    @property
    def out_dim(self) -> int:
        """Return the embedding dimension."""
        return int(self._params["W"].shape[1])

    def _expected_shapes(self, params: ParamDict) -> dict[str, tuple[int, ...]]:
        return _mlp_shapes(params)

    def forward(self, features: FloatArray) -> FloatArray:
        """Return the embedding of a batch."""
        return _mlp_forward(self._check_input(features), self._params)[2]

    def backward(self, features: FloatArray, grad_out: FloatArray) -> HeadGradients:
        """Return gradients given the gradient on the embedding."""
        return _mlp_backward(self._check_input(features), self._params, grad_out)


def _gaussian(rng: RngState, shape: tuple[int, int], fan_in: int, dtype) -> FloatArray:
    return rng.generator.normal(0.0, 1.0 / np.sqrt(fan_in), size=shape).astype(dtype)


def init_head(
    kind: HeadKind,
    in_dim: int,
    hidden: int,
    n_clusters: int,
    rng: RngState,
    dtype: type[np.floating] = np.float64,
) -> ClassifierHead:
    """Initialise a head with N(0, 1/fan_in) weights and zero biases.

    Args:
    ----
        kind (HeadKind): "linear" or "two_layer".
        in_dim (int): Feature dimension D.
        hidden (int): Hidden width H, only used by "two_layer".
        n_clusters (int): Number of clusters K.
        rng (RngState): Random state.
        dtype (type[np.floating]): Parameter dtype.

    """
    if in_dim < 1 or n_clusters < 1:
        raise ConfigError(f"head needs D >= 1 and K >= 1, got D={in_dim}, K={n_clusters}.")
    if kind == "linear":
        return LinearHead(
            {
                "W": _gaussian(rng, (in_dim, n_clusters), in_dim, dtype),
                "b": np.zeros(n_clusters, dtype=dtype),
            }
        )
    if kind == "two_layer":
        if hidden < 1:
            raise ConfigError(f"two_layer head needs H >= 1, got {hidden}.", "head.hidden")
        return TwoLayerHead(
            {
                "W1": _gaussian(rng, (in_dim, hidden), in_dim, dtype),
                "b1": np.zeros(hidden, dtype=dtype),
                "W": _gaussian(rng, (hidden, n_clusters), hidden, dtype),
                "b": np.zeros(n_clusters, dtype=dtype),
            }
        )
    raise ConfigError(f"unknown head kind {kind!r}.", "head.kind")


def init_backbone(
    in_dim: int,
    hidden: int,
    out_dim: int,
    rng: RngState,
    dtype: type[np.floating] = np.float64,
) -> MLPBackbone:
    """Initialise a mini-backbone the same way as a two-layer head."""
    if min(in_dim, hidden, out_dim) < 1:
        raise ConfigError(
            f"backbone needs positive dimensions, got D={in_dim}, H={hidden}, out={out_dim}.",
            "backbone.hidden",
        )
    return MLPBackbone(
        {
            "W1": _gaussian(rng, (in_dim, hidden), in_dim, dtype),
            "b1": np.zeros(hidden, dtype=dtype),
            "W": _gaussian(rng, (hidden, out_dim), hidden, dtype),
            "b": np.zeros(out_dim, dtype=dtype),
        }
    )


def forward(head: ClassifierHead, features: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Return (logits, probs) of a head on a batch."""
    return head.forward(features)


def backward(
    head: ClassifierHead, features: FloatArray, upstream_grad_on_probs: FloatArray
) -> HeadGradients:
    """Return the head gradients given the gradient on its probabilities."""
    return head.backward(features, upstream_grad_on_probs)
