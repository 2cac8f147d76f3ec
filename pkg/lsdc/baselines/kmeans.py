"""K-means baseline on a feature matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.cluster import kmeans_plusplus

from lsdc._types import FloatArray, IntArray
from lsdc.data import FeatureMatrix, RngState
from lsdc.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KMeansModel:
    """A fitted k-means clustering.

    Attributes
    ----------
        centroids (FloatArray): K x D cluster centres.
        assignments (IntArray): Nearest-centroid index of every sample.
        inertia (float): Sum of squared distances to the assigned centroids.
        inertia_trace (tuple[float, ...]): Inertia after every assignment step.
        n_iter (int): Number of Lloyd iterations run.

    """

    centroids: FloatArray
    assignments: IntArray
    inertia: float
    inertia_trace: tuple[float, ...]
    n_iter: int

    def predict(self, features: FeatureMatrix | FloatArray) -> IntArray:
        """Return the nearest centroid of every row, ties to the lower index."""
        x = features.data if isinstance(features, FeatureMatrix) else np.asarray(features)
        return _assign(x, self.centroids)[0]


def _assign(x: FloatArray, centroids: FloatArray) -> tuple[IntArray, FloatArray]:
    d2 = cdist(x, centroids, "sqeuclidean")
    assignments = d2.argmin(axis=1)
    return assignments, d2[np.arange(x.shape[0]), assignments]


def kmeans(
    features: FeatureMatrix,
    n_clusters: int,
    max_iter: int = 300,
    tol: float = 1e-6,
    rng: RngState | None = None,
) -> KMeansModel:
    """Cluster features with k-means++ seeding and Lloyd iterations.

    Iterations stop once no centroid moves by tol or more, or after max_iter.
    A cluster left empty is moved onto the sample farthest from its own
    centroid.

    Args:
    ----
        features (FeatureMatrix): The N x D samples.
        n_clusters (int): Number of clusters K, at most N.
        max_iter (int): Iteration cap.
        tol (float): Threshold on the largest centroid shift.
        rng (RngState | None): Random state for the seeding, seed 0 when omitted.

    Raises:
    ------
        ConfigError: If K is not in [1, N].

    """
    x = np.asarray(features.data, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= n_clusters <= n:
        raise ConfigError(
            f"k-means needs 1 <= K <= N, got K={n_clusters} for N={n}.", "k_clusters"
        )
    rng = RngState(0) if rng is None else rng
    centroids, _ = kmeans_plusplus(x, n_clusters, random_state=rng.sklearn_seed())

    trace: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        assignments, dist = _assign(x, centroids)
        trace.append(float(dist.sum()))
        updated = centroids.copy()
        counts = np.bincount(assignments, minlength=n_clusters)
        for c in np.flatnonzero(counts):
            updated[c] = x[assignments == c].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            farthest = np.argsort(-dist, kind="stable")[: empty.size]
            updated[empty] = x[farthest]
            logger.debug("reseeded %d empty clusters at iteration %d", empty.size, n_iter)
        shift = float(np.linalg.norm(updated - centroids, axis=1).max())
        centroids = updated
        if shift < tol:
            break

    assignments, dist = _assign(x, centroids)
    inertia = float(dist.sum())
    trace.append(inertia)
    logger.info("k-means: K=%d, %d iterations, inertia %.6g", n_clusters, n_iter, inertia)
    return KMeansModel(centroids, assignments, inertia, tuple(trace), n_iter)
