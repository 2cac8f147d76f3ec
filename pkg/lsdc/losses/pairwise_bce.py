"""Pairwise binary cross-entropy clustering loss."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from lsdc._types import FloatArray
from lsdc.errors import DataError
from lsdc.pairwise import AdjacencyMatrix

AGREEMENT_EPS = 1e-7


class LossValue(NamedTuple):
    """A scalar loss with its gradients on both probability matrices."""

    value: float
    grad_p: FloatArray
    grad_p_prime: FloatArray


@dataclass(frozen=True)
class PairTargetMatrix:
    """B x B soft pairwise targets with entries in [0, 1].

    Equals the adjacency matrix when no composition is active; under
    composition row i holds the targets of raw sample i against every composite
    sample and the matrix is generally asymmetric.

    Attributes
    ----------
        t (FloatArray): The B x B target matrix.

    """

    t: FloatArray

    def __post_init__(self):
        """Validate shape and range."""
        t = np.asarray(self.t, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DataError(f"pair targets must be square, got shape {t.shape}.")
        if not np.isfinite(t).all() or t.min(initial=0.0) < 0.0 or t.max(initial=0.0) > 1.0:
            raise DataError("pair targets must lie in [0, 1].")
        object.__setattr__(self, "t", t)

    @classmethod
    def from_adjacency(cls, adjacency: AdjacencyMatrix) -> PairTargetMatrix:
        """Return the binary targets of an adjacency matrix."""
        return cls(adjacency.as_float())

    @property
    def size(self) -> int:
        """Return the batch size B."""
        return int(self.t.shape[0])


def _as_targets(targets: PairTargetMatrix | AdjacencyMatrix | FloatArray) -> PairTargetMatrix:
    if isinstance(targets, PairTargetMatrix):
        return targets
    if isinstance(targets, AdjacencyMatrix):
        return PairTargetMatrix.from_adjacency(targets)
    return PairTargetMatrix(targets)


def _check_probs(p: FloatArray, p_prime: FloatArray) -> None:
    if p.ndim != 2 or p.shape != p_prime.shape:
        raise DataError(
            f"probability matrices must share a B x K shape, got {p.shape} and {p_prime.shape}."
        )


def _raw_agreement(p: FloatArray, p_prime: FloatArray) -> FloatArray:
    p = np.asarray(p)
    p_prime = np.asarray(p_prime)
    _check_probs(p, p_prime)
    return p @ p_prime.T


def pair_agreement(p: FloatArray, p_prime: FloatArray) -> FloatArray:
    """Return the clamped probabilities that samples i and j share a cluster.

    Entry (i, j) is the dot product of p_i and p'_j clamped to
    [AGREEMENT_EPS, 1 - AGREEMENT_EPS].

    Args:
    ----
        p (FloatArray): B x K probabilities of the raw batch.
        p_prime (FloatArray): B x K probabilities of the second branch.

    Raises:
    ------
        DataError: If the shapes differ.

    """
    return np.clip(_raw_agreement(p, p_prime), AGREEMENT_EPS, 1.0 - AGREEMENT_EPS)


def clustering_loss(
    p: FloatArray,
    p_prime: FloatArray,
    targets: PairTargetMatrix | AdjacencyMatrix | FloatArray,
) -> LossValue:
    """Return the pairwise BCE between agreements and targets, divided by B^2.

    The sum runs over every ordered pair including the diagonal. Gradients are
    those of the clamped expression, so they vanish wherever the raw agreement
    falls outside the clamp interval.

    Args:
    ----
        p (FloatArray): B x K probabilities of the raw batch.
        p_prime (FloatArray): B x K probabilities of the second branch.
        targets: B x B targets in [0, 1].

    Returns:
    -------
        LossValue: The loss and its gradients on p and p_prime.

    """
    p = np.asarray(p)
    p_prime = np.asarray(p_prime)
    t = _as_targets(targets).t
    raw = _raw_agreement(p, p_prime)
    if t.shape != raw.shape:
        raise DataError(f"targets have shape {t.shape}, expected {raw.shape}.")
    n_pairs = raw.shape[0] ** 2
    agreement = np.clip(raw, AGREEMENT_EPS, 1.0 - AGREEMENT_EPS)

    terms = t * np.log(agreement) + (1.0 - t) * np.log1p(-agreement)
    value = -float(terms.sum()) / n_pairs

    inside = (raw > AGREEMENT_EPS) & (raw < 1.0 - AGREEMENT_EPS)
    grad_s = np.where(inside, -(t / agreement - (1.0 - t) / (1.0 - agreement)), 0.0) / n_pairs
    return LossValue(value, grad_s @ p_prime, grad_s.T @ p)
