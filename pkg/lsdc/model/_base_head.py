"""Abstract trainable blocks and the classifier head base class."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from lsdc._types import FloatArray, ParamDict
from lsdc.errors import DataError


def softmax(logits: FloatArray) -> FloatArray:
    """Row-wise softmax with the max-shift for stability."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_backward(probs: FloatArray, grad_probs: FloatArray) -> FloatArray:
    """Apply the softmax Jacobian row-wise: p_k (g_k - sum_m p_m g_m)."""
    return probs * (grad_probs - (probs * grad_probs).sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class HeadGradients:
    """Gradients of a scalar loss for a trainable block.

    Attributes
    ----------
        params (ParamDict): Gradient of every parameter, keyed like the block's
            parameters.
        inputs (FloatArray): Gradient with respect to the block input, used to
            chain into a trainable backbone.

    """

    params: ParamDict
    inputs: FloatArray


class TrainableBlock(ABC):
    """Abstract block of named parameter arrays with analytic gradients.

    Args:
    ----
        params (ParamDict): The parameter arrays. Shapes are validated by the
            concrete class.

    """

    def __init__(self, params: ParamDict):
        """Initialise the TrainableBlock."""
        self._params = {name: np.asarray(value) for name, value in params.items()}
        self._verify_params(self._params)

    @property
    def params(self) -> ParamDict:
        """Return the parameter arrays (shared, not copied)."""
        return dict(self._params)

    @property
    @abstractmethod
    def param_names(self) -> tuple[str, ...]:
        """Return the parameter names in serialisation order."""
        pass

    @property
    @abstractmethod
    def in_dim(self) -> int:
        """Return the input dimension."""
        pass

    @property
    @abstractmethod
    def out_dim(self) -> int:
        """Return the output dimension."""
        pass

    @property
    def hidden_dim(self) -> int:
        """Return the hidden width, 0 for single-layer blocks."""
        return 0

    @property
    def dtype(self) -> np.dtype:
        """Return the floating dtype of the parameters."""
        return next(iter(self._params.values())).dtype

    @abstractmethod
    def _expected_shapes(self, params: ParamDict) -> dict[str, tuple[int, ...]]:
        pass

    def _verify_params(self, params: ParamDict, reference: ParamDict | None = None) -> None:
        if set(params) != set(self.param_names):
            raise DataError(
                f"{self!r} expects parameters {self.param_names}, got {tuple(params)}."
            )
        expected = self._expected_shapes(params if reference is None else reference)
        for name, shape in expected.items():
            if params[name].shape != shape:
                raise DataError(
                    f"{self!r} parameter {name} has shape {params[name].shape}, expected {shape}."
                )
            if not np.isfinite(params[name]).all():
                raise DataError(f"{self!r} parameter {name} holds non-finite values.")

    def set_params(self, params: ParamDict) -> None:
        """Replace the parameters with arrays of identical shapes, keeping the dtype."""
        new = {name: np.asarray(value, dtype=self.dtype) for name, value in params.items()}
        self._verify_params(new, reference=self._params)
        self._params = new

    def _check_input(self, features: FloatArray) -> FloatArray:
        x = np.asarray(features)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise DataError(
                f"{self!r} takes inputs of dimension {self.in_dim}, got shape {x.shape}."
            )
        return x

    def __repr__(self):
        """Return a string representation of the block."""
        return f"{self.__class__.__name__}"


class ClassifierHead(TrainableBlock):
    """Abstract map from feature space to K cluster probabilities.

    Concrete heads compute the logits and back-propagate a gradient on the
    logits; this class adds the softmax and its Jacobian.
    """

    kind: str = "base"

    @property
    def n_clusters(self) -> int:
        """Return the number of clusters K."""
        return self.out_dim

    @abstractmethod
    def logits(self, features: FloatArray) -> FloatArray:
        """Return the B x K pre-softmax logits."""
        pass

    @abstractmethod
    def _backward_logits(self, features: FloatArray, grad_logits: FloatArray) -> HeadGradients:
        pass

    def forward(self, features: FloatArray) -> tuple[FloatArray, FloatArray]:
        """Return the logits and the row-wise softmax probabilities."""
        logits = self.logits(self._check_input(features))
        return logits, softmax(logits)

    def backward(self, features: FloatArray, grad_probs: FloatArray) -> HeadGradients:
        """Return parameter and input gradients given the gradient on the probabilities.

        Args:
        ----
            features (FloatArray): B x D input batch.
            grad_probs (FloatArray): B x K gradient of the loss on the probabilities.

        """
        x = self._check_input(features)
        _, probs = self.forward(x)
        if grad_probs.shape != probs.shape:
            raise DataError(
                f"upstream gradient has shape {grad_probs.shape}, expected {probs.shape}."
            )
        return self._backward_logits(x, softmax_backward(probs, grad_probs))
