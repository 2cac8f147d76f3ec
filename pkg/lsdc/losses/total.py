"""Combined clustering and consistency objective."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from lsdc._types import FloatArray
from lsdc.losses.consistency import consistency_mse
from lsdc.losses.pairwise_bce import LossValue, PairTargetMatrix, clustering_loss
from lsdc.pairwise import AdjacencyMatrix


class LossTerms(NamedTuple):
    """The clustering, consistency and summed parts of the objective."""

    clustering: LossValue
    consistency: LossValue
    total: LossValue


def total_loss_terms(
    p: FloatArray,
    p_prime: FloatArray,
    targets: PairTargetMatrix | AdjacencyMatrix | FloatArray,
    omega: float,
    n_clusters: int,
    mse_enabled: bool = True,
) -> LossTerms:
    """Return every part of the objective.

    With mse_enabled False the consistency part is exactly zero, which matches
    omega = 0.
    """
    clus = clustering_loss(p, p_prime, targets)
    if mse_enabled:
        cons = consistency_mse(p, p_prime, omega, n_clusters)
    else:
        zeros = np.zeros_like(clus.grad_p)
        cons = LossValue(0.0, zeros, zeros.copy())
    total = LossValue(
        clus.value + cons.value,
        clus.grad_p + cons.grad_p,
        clus.grad_p_prime + cons.grad_p_prime,
    )
    return LossTerms(clus, cons, total)


def total_loss(
    p: FloatArray,
    p_prime: FloatArray,
    targets: PairTargetMatrix | AdjacencyMatrix | FloatArray,
    omega: float,
    n_clusters: int,
    mse_enabled: bool = True,
) -> LossValue:
    """Return the clustering loss plus the weighted consistency term."""
    return total_loss_terms(p, p_prime, targets, omega, n_clusters, mse_enabled).total
