"""Pairwise targets and loss for raw-versus-composite pairs."""

from __future__ import annotations

import numpy as np

from lsdc._types import FloatArray
from lsdc.composition.plans import CompositePlan
from lsdc.errors import DataError
from lsdc.losses import LossValue, PairTargetMatrix, clustering_loss
from lsdc.pairwise import AdjacencyMatrix


def composite_targets(adjacency: AdjacencyMatrix, plan: CompositePlan) -> PairTargetMatrix:
    """Return t_ij = sum_s w_s A[i, perm_s(j)].

    The target between raw sample i and composite sample j is the weighted
    adjacency between i and the components of j.
    """
    if adjacency.size != plan.size:
        raise DataError(f"adjacency has size {adjacency.size}, plan has size {plan.size}.")
    a = adjacency.as_float()
    t = np.zeros_like(a)
    for weight, perm in zip(plan.weights, plan.perms):
        t += weight * a[:, perm]
    return PairTargetMatrix(np.clip(t, 0.0, 1.0))


def composite_clustering_loss(
    p: FloatArray,
    p_tilde: FloatArray,
    adjacency: AdjacencyMatrix,
    plan: CompositePlan,
) -> LossValue:
    """Return the clustering loss of raw predictions against composite predictions.

    Args:
    ----
        p (FloatArray): B x K probabilities of the raw batch.
        p_tilde (FloatArray): B x K probabilities of plan.composite_features.
        adjacency (AdjacencyMatrix): Adjacency of the raw batch.
        plan (CompositePlan): The plan that built the composite batch.

    """
    return clustering_loss(p, p_tilde, composite_targets(adjacency, plan))
