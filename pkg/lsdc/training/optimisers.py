"""SGD with momentum and Adam on parameter dictionaries."""

from __future__ import annotations

import numpy as np

from lsdc._types import ParamDict
from lsdc.training._base_optimiser import BaseOptimiser, OptimizerState, check_matching
from lsdc.training.config import RunConfig


def sgd_step(
    params: ParamDict,
    grads: ParamDict,
    state: OptimizerState | None,
    lr: float,
    momentum: float,
    weight_decay: float,
) -> tuple[ParamDict, OptimizerState]:
    """Apply one SGD-with-momentum update.

    g = grad + weight_decay * param, v = momentum * v + g, param -= lr * v.
    The inputs are not modified.

    Args:
    ----
        params (ParamDict): Current parameters.
        grads (ParamDict): Gradients with the same names and shapes.
        state (OptimizerState | None): Velocity buffers, None for zero.
        lr (float): Learning rate.
        momentum (float): Momentum coefficient.
        weight_decay (float): L2 coefficient.

    Returns:
    -------
        tuple[ParamDict, OptimizerState]: The new parameters and state.

    """
    check_matching(params, grads)
    state = OptimizerState.zeros(params, ("velocity",)) if state is None else state.copy()
    velocity = state.buffers["velocity"]
    new_params = {}
    for name, value in params.items():
        g = grads[name] + weight_decay * value
        velocity[name] = momentum * velocity[name] + g
        new_params[name] = value - lr * velocity[name]
    state.step += 1
    return new_params, state


def adam_step(
    params: ParamDict,
    grads: ParamDict,
    state: OptimizerState | None,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> tuple[ParamDict, OptimizerState]:
    """Apply one bias-corrected Adam update with weight decay in the gradient.

    The inputs are not modified.

    Returns
    -------
        tuple[ParamDict, OptimizerState]: The new parameters and state.

    """
    check_matching(params, grads)
    state = OptimizerState.zeros(params, ("m", "v")) if state is None else state.copy()
    state.step += 1
    first, second = state.buffers["m"], state.buffers["v"]
    correction1 = 1.0 - beta1**state.step
    correction2 = 1.0 - beta2**state.step
    new_params = {}
    for name, value in params.items():
        g = grads[name] + weight_decay * value
        first[name] = beta1 * first[name] + (1.0 - beta1) * g
        second[name] = beta2 * second[name] + (1.0 - beta2) * g * g
        m_hat = first[name] / correction1
        v_hat = second[name] / correction2
        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + eps)
    return new_params, state


class SGDMomentumOptimiser(BaseOptimiser):
    """Stateful wrapper around sgd_step.

    Args:
    ----
        momentum (float): Momentum coefficient.
        weight_decay (float): L2 coefficient.

    """

    def __init__(self, momentum: float = 0.9, weight_decay: float = 0.0):
        """Initialise the SGDMomentumOptimiser."""
        super().__init__(weight_decay)
        self._momentum = momentum

    @property
    def momentum(self) -> float:
        """Return the momentum coefficient."""
        return self._momentum

    def _update(self, params, grads, state, lr):
        return sgd_step(params, grads, state, lr, self._momentum, self._weight_decay)


class AdamOptimiser(BaseOptimiser):
    """Stateful wrapper around adam_step."""

    def __init__(
        self,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        """Initialise the AdamOptimiser."""
        super().__init__(weight_decay)
        self._beta1 = beta1
        self._beta2 = beta2
        self._eps = eps

    def _update(self, params, grads, state, lr):
        return adam_step(
            params, grads, state, lr, self._beta1, self._beta2, self._eps, self._weight_decay
        )


def make_optimiser(cfg: RunConfig) -> BaseOptimiser:
    """Return the optimiser selected by a run configuration."""
    if cfg.optimizer == "adam":
        return AdamOptimiser(weight_decay=cfg.effective_weight_decay)
    return SGDMomentumOptimiser(cfg.momentum, cfg.effective_weight_decay)
