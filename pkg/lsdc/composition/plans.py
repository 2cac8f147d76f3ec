"""Composite minibatches built from weighted permutations of the batch."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from lsdc._types import FloatArray, IntArray
from lsdc.data import RngState
from lsdc.errors import ConfigError, DataError

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of the Beta distribution used for mixing weights.

    Attributes
    ----------
        alpha (float): First shape, > 0.
        beta (float): Second shape, > 0.

    """

    alpha: float = 0.3
    beta: float = 0.3

    def __post_init__(self):
        """Validate the shapes."""
        if not (self.alpha > 0 and self.beta > 0):
            raise ConfigError(
                f"Beta parameters must be positive, got ({self.alpha}, {self.beta}).", "beta"
            )


@dataclass(frozen=True)
class CompositePlan:
    """Permutations and convex weights describing a composite batch.

    Composite sample j is sum_s weights[s] * features[perms[s][j]].

    Attributes
    ----------
        perms (tuple[IntArray, ...]): S permutations of range(B).
        weights (FloatArray): Length-S non-negative weights summing to 1.
        composite_features (FloatArray): The B x D composite batch.

    Raises
    ------
        DataError: If a permutation is not a bijection, the weights are not
            convex or the features do not have B rows.

    """

    perms: tuple[IntArray, ...]
    weights: FloatArray
    composite_features: FloatArray

    def __post_init__(self):
        """Validate the plan."""
        perms = tuple(np.asarray(perm, dtype=np.int64) for perm in self.perms)
        weights = np.asarray(self.weights, dtype=np.float64)
        if not perms:
            raise DataError("a composite plan needs at least one permutation.")
        if weights.shape != (len(perms),):
            raise DataError(f"expected {len(perms)} weights, got shape {weights.shape}.")
        if (weights < 0).any() or abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise DataError(f"plan weights must be non-negative and sum to 1, got {weights}.")
        size = perms[0].shape[0]
        identity = np.arange(size)
        for s, perm in enumerate(perms):
            if perm.shape != (size,) or not np.array_equal(np.sort(perm), identity):
                raise DataError(f"plan permutation {s} is not a permutation of range({size}).")
        if np.asarray(self.composite_features).shape[0] != size:
            raise DataError(
                f"composite features have {np.asarray(self.composite_features).shape[0]} "
                f"rows, expected {size}."
            )
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        """Return the batch size B."""
        return int(self.perms[0].shape[0])

    @property
    def n_perms(self) -> int:
        """Return the number of permutations S."""
        return len(self.perms)

    @classmethod
    def identity(cls, features: FloatArray) -> CompositePlan:
        """Return the single-permutation plan that leaves the batch unchanged."""
        return cls((np.arange(features.shape[0]),), np.ones(1), np.array(features, copy=True))


def sample_beta(params: BetaParams, rng: RngState) -> float:
    """Draw one value from Beta(alpha, beta)."""
    return float(rng.generator.beta(params.alpha, params.beta))


def _combine(features: FloatArray, perms: Sequence[IntArray], weights: FloatArray) -> FloatArray:
    out = np.zeros_like(features)
    for weight, perm in zip(weights, perms):
        out += weight * features[perm]
    return out


def mixup_compose(
    features: FloatArray,
    rng: RngState,
    params: BetaParams,
    mix_weight: float | None = None,
    permutation: IntArray | None = None,
) -> CompositePlan:
    """Mix the batch with a random permutation of itself.

    One weight m ~ Beta(alpha, beta) is drawn per batch; composite sample i is
    m * f_i + (1 - m) * f_pi(i).

    Args:
    ----
        features (FloatArray): B x D batch.
        rng (RngState): Random state.
        params (BetaParams): Mixing distribution.
        mix_weight (float | None): Fixes m instead of drawing it.
        permutation (IntArray | None): Fixes pi instead of drawing it.

    """
    features = np.asarray(features)
    size = features.shape[0]
    if size < 2:
        raise ConfigError(f"mixup needs a batch of at least 2 samples, got {size}.", "batch_size")
    m = sample_beta(params, rng) if mix_weight is None else float(mix_weight)
    perm = rng.generator.permutation(size) if permutation is None else np.asarray(permutation)
    perms = (np.arange(size), perm)
    weights = np.array([m, 1.0 - m])
    return CompositePlan(perms, weights, _combine(features, perms, weights))


def ricap_compose(
    features: FloatArray,
    rng: RngState,
    params: BetaParams,
    corner: tuple[float, float] | None = None,
) -> CompositePlan:
    """Compose each sample from four batch members, weighted like RICAP patches.

    A crop corner (w, h) with both coordinates ~ Beta(alpha, beta) splits the
    unit square into four patches; their areas weight the identity and three
    random permutations.

    Args:
    ----
        features (FloatArray): B x D batch.
        rng (RngState): Random state.
        params (BetaParams): Distribution of the crop corner coordinates.
        corner (tuple[float, float] | None): Fixes (w, h) instead of drawing it.

    """
    features = np.asarray(features)
    size = features.shape[0]
    if size < 2:
        raise ConfigError(f"ricap needs a batch of at least 2 samples, got {size}.", "batch_size")
    if corner is None:
        w, h = sample_beta(params, rng), sample_beta(params, rng)
    else:
        w, h = corner
    weights = np.array([w * h, (1.0 - w) * h, w * (1.0 - h), (1.0 - w) * (1.0 - h)])
    perms = (np.arange(size), *(rng.generator.permutation(size) for _ in range(3)))
    return CompositePlan(perms, weights, _combine(features, perms, weights))
