"""Optimiser state and the abstract optimiser."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from lsdc._types import ParamDict
from lsdc.errors import DataError


@dataclass
class OptimizerState:
    """Per-parameter buffers of an optimiser.

    Attributes
    ----------
        buffers (dict[str, ParamDict]): Named buffer families, each mirroring the
            parameter shapes ("velocity" for SGD, "m" and "v" for Adam).
        step (int): Number of updates applied so far.

    """

    buffers: dict[str, ParamDict] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def zeros(cls, params: ParamDict, names: tuple[str, ...]) -> OptimizerState:
        """Return a state of zero buffers shaped like params."""
        return cls({name: {k: np.zeros_like(v) for k, v in params.items()} for name in names})

    def copy(self) -> OptimizerState:
        """Return a deep copy of the state."""
        return OptimizerState(
            {name: {k: v.copy() for k, v in buf.items()} for name, buf in self.buffers.items()},
            self.step,
        )


def check_matching(params: ParamDict, grads: ParamDict) -> None:
    """Raise a DataError unless params and grads hold the same names and shapes."""
    if set(params) != set(grads):
        raise DataError(f"gradient names {sorted(grads)} do not match {sorted(params)}.")
    for name, value in params.items():
        if np.shape(grads[name]) != np.shape(value):
            raise DataError(
                f"gradient of {name} has shape {np.shape(grads[name])}, "
                f"expected {np.shape(value)}."
            )


class BaseOptimiser(ABC):
    """Abstract stateful optimiser over a dictionary of parameter arrays.

    Args:
    ----
        weight_decay (float): L2 coefficient folded into the gradient.

    """

    def __init__(self, weight_decay: float = 0.0):
        """Initialise the BaseOptimiser."""
        self._weight_decay = weight_decay
        self._state: OptimizerState | None = None

    @property
    def weight_decay(self) -> float:
        """Return the weight decay coefficient."""
        return self._weight_decay

    @property
    def state(self) -> OptimizerState | None:
        """Return the current state, None before the first step."""
        return self._state

    @abstractmethod
    def _update(
        self, params: ParamDict, grads: ParamDict, state: OptimizerState | None, lr: float
    ) -> tuple[ParamDict, OptimizerState]:
        pass

    def step(self, params: ParamDict, grads: ParamDict, lr: float) -> ParamDict:
        """Apply one update and return the new parameters."""
        new_params, self._state = self._update(params, grads, self._state, lr)
        return new_params

    def __repr__(self):
        """Return a string representation of the optimiser."""
        return f"{self.__class__.__name__}(weight_decay={self._weight_decay})"
