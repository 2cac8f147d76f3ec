"""Feature-space augmentations producing the augmented branch x'."""

from __future__ import annotations

from typing import Literal

import numpy as np

from lsdc._types import FloatArray
from lsdc.data.rng import RngState
from lsdc.errors import ConfigError

AugmentMode = Literal["gaussian_noise", "feature_dropout"]
AUGMENT_MODES: tuple[str, ...] = ("gaussian_noise", "feature_dropout")


def augment(
    features: FloatArray, mode: AugmentMode, strength: float, rng: RngState
) -> FloatArray:
    """Return an augmented copy of a B x D feature batch.

    gaussian_noise adds N(0, strength^2) to every entry. feature_dropout zeroes
    each entry independently with probability strength and rescales the
    survivors by 1 / (1 - strength).

    Raises
    ------
        ConfigError: For an unknown mode, a negative strength or a dropout
            strength of 1 or more.

    """
    if strength < 0:
        raise ConfigError(
            f"augment strength must be non-negative, got {strength}.", "augment.strength"
        )
    features = np.asarray(features)
    if mode == "gaussian_noise":
        noise = rng.generator.normal(0.0, strength, size=features.shape)
        return features + noise.astype(features.dtype)
    if mode == "feature_dropout":
        if strength >= 1:
            raise ConfigError(
                f"feature_dropout strength must be below 1, got {strength}.",
                "augment.strength",
            )
        keep = rng.generator.random(features.shape) >= strength
        return np.where(keep, features / (1.0 - strength), 0.0).astype(features.dtype)
    raise ConfigError(f"unknown augment mode {mode!r}.", "augment.mode")
