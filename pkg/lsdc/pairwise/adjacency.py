"""Functional interface for building minibatch adjacency matrices."""

from __future__ import annotations

import logging

import numpy as np

from lsdc._types import FloatArray
from lsdc.errors import ConfigError, DataError
from lsdc.pairwise._base_similarity import AdjacencyMatrix
from lsdc.pairwise.distances import BaseDistanceBackend, pairwise_sq_distances
from lsdc.pairwise.similarities import (
    CosineSimilarity,
    KNNSimilarity,
    L2Similarity,
    SimilarityConfig,
    SNESimilarity,
    cosine_similarity_matrix,
    sne_similarity,
)

logger = logging.getLogger(__name__)


def adjacency_l2(
    features: FloatArray, tau: float, backend: BaseDistanceBackend | None = None
) -> AdjacencyMatrix:
    """Connect pairs whose squared Euclidean distance is strictly below tau."""
    return L2Similarity(tau, backend)(features)


def adjacency_cosine(features: FloatArray, tau: float) -> AdjacencyMatrix:
    """Connect pairs whose cosine is strictly above tau."""
    return CosineSimilarity(tau)(features)


def adjacency_sne(
    features: FloatArray,
    tau: float,
    temperature: float,
    backend: BaseDistanceBackend | None = None,
) -> AdjacencyMatrix:
    """Connect pairs whose symmetric SNE similarity is strictly above tau."""
    return SNESimilarity(tau, temperature, backend)(features)


def adjacency_knn(
    features: FloatArray, k: int, backend: BaseDistanceBackend | None = None
) -> AdjacencyMatrix:
    """Connect pairs where one sample is among the k nearest neighbours of the other."""
    return KNNSimilarity(k, backend)(features)


def build_adjacency(
    cfg: SimilarityConfig,
    features_or_logits: FloatArray,
    backend: BaseDistanceBackend | None = None,
) -> AdjacencyMatrix:
    """Build the adjacency of a batch with the similarity described by cfg.

    The caller passes features when cfg.space is "feature" and pre-softmax
    logits when it is "logit"; the construction is the same.
    """
    return cfg.build(backend)(features_or_logits)


def _midpoint_threshold(ordered: FloatArray, n_edges: int, low: float, high: float) -> float:
    """Return a threshold splitting ordered (best first) after n_edges values.

    low is the threshold admitting every value, high the one admitting none.
    """
    if n_edges == 0:
        return high
    if n_edges == ordered.shape[0]:
        return low
    if ordered[n_edges - 1] == ordered[n_edges]:
        raise DataError(
            f"exactly {n_edges} edges is not achievable: tied similarities at the cut."
        )
    return float((ordered[n_edges - 1] + ordered[n_edges]) / 2)


def calibrate_threshold(
    kind: str,
    features: FloatArray,
    n_edges: int,
    temperature: float | None = None,
    backend: BaseDistanceBackend | None = None,
) -> float:
    """Return the parameter yielding exactly n_edges undirected off-diagonal edges.

    For l2, cosine and sne this is a threshold tau placed halfway between the
    n_edges-th and the next pair value. For knn it is the smallest k whose graph
    has exactly n_edges edges.

    Raises
    ------
        DataError: If no parameter achieves exactly n_edges edges.

    """
    x = np.asarray(features, dtype=np.float64)
    b = x.shape[0]
    if b < 2:
        raise DataError(f"calibration needs at least 2 samples, got {b}.")
    n_pairs = b * (b - 1) // 2
    if not 0 <= n_edges <= n_pairs:
        raise DataError(f"{n_edges} edges requested but a batch of {b} has {n_pairs} pairs.")
    upper = np.triu_indices(b, k=1)

    if kind == "l2":
        values = np.sort(pairwise_sq_distances(x, backend)[upper])
        if n_edges == 0 and values[0] == 0:
            raise DataError("exactly 0 edges is not achievable: duplicate samples.")
        tau = _midpoint_threshold(
            values, n_edges, low=float(values[-1]) * 2 + 1.0, high=float(values[0]) / 2
        )
    elif kind in ("cosine", "sne"):
        if kind == "cosine":
            sims = cosine_similarity_matrix(x)
            floor, ceiling = -1.0, 1.0
        else:
            if temperature is None:
                raise ConfigError(
                    "sne calibration requires a temperature.", "similarity.temperature"
                )
            sims = sne_similarity(x, temperature, backend)
            floor, ceiling = 0.0, 1.0
        values = np.sort(sims[upper])[::-1]
        low = (floor + float(values[-1])) / 2
        high = ceiling if kind == "cosine" else (ceiling + float(values[0])) / 2
        tau = _midpoint_threshold(values, n_edges, low, high)
        if not (floor < tau <= ceiling) or (kind == "sne" and tau >= 1):
            raise DataError(f"exactly {n_edges} edges is not achievable with {kind}.")
    elif kind == "knn":
        for k in range(1, b):
            if KNNSimilarity(k, backend)(x).n_edges == n_edges:
                return float(k)
        raise DataError(f"no k yields exactly {n_edges} knn edges.")
    else:
        raise ConfigError(f"unknown similarity kind {kind!r}.", "similarity.kind")

    logger.debug("calibrated %s threshold %.6g for %d edges", kind, tau, n_edges)
    return tau
