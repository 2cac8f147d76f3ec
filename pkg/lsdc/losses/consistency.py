"""Consistency term between the two branches and its ramp-up weight."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lsdc._types import FloatArray
from lsdc.errors import ConfigError, DataError
from lsdc.losses.pairwise_bce import LossValue

RAMPUP_SHARPNESS = 5.0


def consistency_mse(
    p: FloatArray, p_prime: FloatArray, omega: float, n_clusters: int
) -> LossValue:
    """Return omega / (K B) times the summed squared distance between branches.

    Args:
    ----
        p (FloatArray): B x K probabilities of the raw batch.
        p_prime (FloatArray): B x K probabilities of the second branch.
        omega (float): Non-negative weight.
        n_clusters (int): Number of clusters K.

    """
    if omega < 0:
        raise ConfigError(f"consistency weight must be non-negative, got {omega}.", "lambda")
    p = np.asarray(p)
    p_prime = np.asarray(p_prime)
    if p.ndim != 2 or p.shape != p_prime.shape:
        raise DataError(
            f"probability matrices must share a B x K shape, got {p.shape} and {p_prime.shape}."
        )
    scale = omega / (n_clusters * p.shape[0])
    diff = p - p_prime
    grad = 2.0 * scale * diff
    return LossValue(scale * float((diff**2).sum()), grad, -grad)


@dataclass(frozen=True)
class RampUp:
    """Ramp-up schedule lambda * exp(-5 (1 - t/T)^2), held at lambda from t = T.

    Attributes
    ----------
        lambda_ (float): Plateau weight, > 0.
        ramp_len (int): Ramp length T in optimiser steps, >= 1.

    """

    lambda_: float
    ramp_len: int

    def __post_init__(self):
        """Validate the schedule."""
        if not self.lambda_ > 0:
            raise ConfigError(f"lambda must be positive, got {self.lambda_}.", "lambda")
        if self.ramp_len < 1:
            raise ConfigError(f"ramp length must be >= 1, got {self.ramp_len}.", "ramp_len")

    def weight(self, step: int) -> float:
        """Return omega at the given optimiser step."""
        if step < 0:
            raise ConfigError(f"step must be non-negative, got {step}.")
        if step >= self.ramp_len:
            return float(self.lambda_)
        phase = 1.0 - step / self.ramp_len
        return float(self.lambda_ * np.exp(-RAMPUP_SHARPNESS * phase * phase))


def rampup_weight(cfg: RampUp, step: int) -> float:
    """Return the consistency weight omega(t) of a schedule."""
    return cfg.weight(step)
