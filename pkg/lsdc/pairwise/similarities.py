"""The four pairwise similarities: L2 distance, cosine, symmetric SNE and kNN."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from lsdc._types import BoolArray, FloatArray
from lsdc.errors import ConfigError, DataError
from lsdc.pairwise._base_similarity import AdjacencyMatrix, BaseSimilarity
from lsdc.pairwise.distances import BaseDistanceBackend, pairwise_sq_distances

SimilarityKind = Literal["l2", "cosine", "sne", "knn"]
LabelingSpace = Literal["feature", "logit"]

SIMILARITY_KINDS: tuple[str, ...] = ("l2", "cosine", "sne", "knn")
LABELING_SPACES: tuple[str, ...] = ("feature", "logit")


class L2Similarity(BaseSimilarity):
    """Connect i and j iff their squared Euclidean distance is below tau.

    Args:
    ----
        tau (float): Strictly positive threshold.
        backend (BaseDistanceBackend | None): Squared distance back-end.

    """

    def __init__(self, tau: float, backend: BaseDistanceBackend | None = None):
        """Initialise the L2Similarity."""
        if not tau > 0:
            raise ConfigError(f"l2 tau must be > 0, got {tau}.", "similarity.tau")
        self._tau = float(tau)
        super().__init__(backend)

    @property
    def tau(self) -> float:
        """Return the distance threshold."""
        return self._tau

    def _connections(self, features: FloatArray) -> BoolArray:
        return self.backend.squared_distances(features) < self._tau


def cosine_similarity_matrix(features: FloatArray) -> FloatArray:
    """Return the B x B matrix of cosines between rows.

    Raises
    ------
        DataError: If a row has zero norm.

    """
    x = np.asarray(features, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    zero = norms == 0
    if zero.any():
        row = int(np.flatnonzero(zero)[0])
        raise DataError(f"feature row {row} has zero norm; cosine is undefined.", row=row)
    unit = x / norms[:, None]
    cos = unit @ unit.T
    return (cos + cos.T) / 2


class CosineSimilarity(BaseSimilarity):
    """Connect i and j iff the cosine of their feature vectors exceeds tau.

    Args:
    ----
        tau (float): Threshold in (-1, 1].
        backend (BaseDistanceBackend | None): Unused, kept for a uniform interface.

    """

    def __init__(self, tau: float, backend: BaseDistanceBackend | None = None):
        """Initialise the CosineSimilarity."""
        if not -1 < tau <= 1:
            raise ConfigError(f"cosine tau must lie in (-1, 1], got {tau}.", "similarity.tau")
        self._tau = float(tau)
        super().__init__(backend)

    @property
    def tau(self) -> float:
        """Return the cosine threshold."""
        return self._tau

    def _connections(self, features: FloatArray) -> BoolArray:
        return cosine_similarity_matrix(features) > self._tau


def partition_function(
    features: FloatArray, temperature: float, backend: BaseDistanceBackend | None = None
) -> FloatArray:
    """Return Z_i = sum over k != i of exp(-||f_k - f_i||^2 / T^2), without shifting.

    May underflow to zero for small temperatures; the similarity itself uses the
    shifted form.
    """
    d2 = pairwise_sq_distances(features, backend)
    kernel = np.exp(-d2 / temperature**2)
    np.fill_diagonal(kernel, 0.0)
    return kernel.sum(axis=1)


def sne_similarity(
    features: FloatArray, temperature: float, backend: BaseDistanceBackend | None = None
) -> FloatArray:
    """Return the symmetric SNE similarity (p_{j|i} + p_{i|j}) / 2.

    Every sample shares the same variance T^2. The exponentials of each row are
    shifted by the row maximum before normalisation, which leaves the conditional
    probabilities unchanged.

    Raises
    ------
        DataError: If the partition function vanishes or overflows, which calls
            for a larger temperature.

    """
    d2 = pairwise_sq_distances(features, backend)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        logits = -d2 / temperature**2
        np.fill_diagonal(logits, -np.inf)
        shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
        z = shifted.sum(axis=1, keepdims=True)
        cond = shifted / z
    if not (np.isfinite(z).all() and (z > 0).all() and np.isfinite(cond).all()):
        raise DataError(
            f"SNE partition function underflowed at temperature {temperature}; "
            "use a larger temperature."
        )
    return (cond + cond.T) / 2


class SNESimilarity(BaseSimilarity):
    """Connect i and j iff their symmetric SNE similarity exceeds tau.

    Equivalently exp(-||f_j - f_i||^2 / T^2) divided by the harmonic mean of the
    partition functions Z_i and Z_j exceeds tau. Samples in dense regions have
    large partition functions, so their similarities are damped.

    Args:
    ----
        tau (float): Threshold in (0, 1).
        temperature (float): Temperature T > 0.
        backend (BaseDistanceBackend | None): Squared distance back-end.

    """

    def __init__(
        self, tau: float, temperature: float, backend: BaseDistanceBackend | None = None
    ):
        """Initialise the SNESimilarity."""
        if not 0 < tau < 1:
            raise ConfigError(f"sne tau must lie in (0, 1), got {tau}.", "similarity.tau")
        if not temperature > 0:
            raise ConfigError(
                f"sne temperature must be > 0, got {temperature}.", "similarity.temperature"
            )
        self._tau = float(tau)
        self._temperature = float(temperature)
        super().__init__(backend)

    @property
    def tau(self) -> float:
        """Return the similarity threshold."""
        return self._tau

    @property
    def temperature(self) -> float:
        """Return the temperature."""
        return self._temperature

    def _connections(self, features: FloatArray) -> BoolArray:
        return sne_similarity(features, self._temperature, self.backend) > self._tau


class KNNSimilarity(BaseSimilarity):
    """Connect i and j iff one is among the k nearest neighbours of the other.

    Neighbours are ranked by squared Euclidean distance within the minibatch,
    excluding the sample itself. Ties at the k-th distance go to the lower index.

    Args:
    ----
        k (int): Number of neighbours, 1 <= k <= B - 1.
        backend (BaseDistanceBackend | None): Squared distance back-end.

    """

    def __init__(self, k: int, backend: BaseDistanceBackend | None = None):
        """Initialise the KNNSimilarity."""
        if int(k) != k or k < 1:
            raise ConfigError(f"knn k must be a positive integer, got {k}.", "similarity.k")
        self._k = int(k)
        super().__init__(backend)

    @property
    def k(self) -> int:
        """Return the number of neighbours."""
        return self._k

    @property
    def min_batch_size(self) -> int:
        """Return k + 1, the smallest batch with k neighbours per sample."""
        return self._k + 1

    def __call__(self, features: FloatArray) -> AdjacencyMatrix:
        """Build the kNN adjacency, rejecting k >= B as a configuration error."""
        n = np.asarray(features).shape[0]
        if self._k >= n:
            raise ConfigError(
                f"knn k={self._k} must be below the batch size {n}.", "similarity.k"
            )
        return super().__call__(features)

    def _connections(self, features: FloatArray) -> BoolArray:
        d2 = self.backend.squared_distances(features)
        np.fill_diagonal(d2, np.inf)
        neighbours = np.argsort(d2, axis=1, kind="stable")[:, : self._k]
        directed = np.zeros(d2.shape, dtype=bool)
        np.put_along_axis(directed, neighbours, True, axis=1)
        return directed


@dataclass(frozen=True)
class SimilarityConfig:
    """Pairwise labeling configuration.

    Only the parameters relevant to kind are required: tau for l2 and cosine,
    tau and temperature for sne, k for knn. space selects whether the adjacency
    is built from features or from pre-softmax logits.
    """

    kind: SimilarityKind = "knn"
    tau: float | None = None
    temperature: float | None = None
    k: int | None = None
    space: LabelingSpace = "feature"

    def __post_init__(self):
        """Validate by building the similarity once."""
        if self.kind not in SIMILARITY_KINDS:
            raise ConfigError(f"unknown similarity kind {self.kind!r}.", "similarity.kind")
        if self.space not in LABELING_SPACES:
            raise ConfigError(f"unknown labeling space {self.space!r}.", "similarity.space")
        required = {
            "l2": ("tau",),
            "cosine": ("tau",),
            "sne": ("tau", "temperature"),
            "knn": ("k",),
        }[self.kind]
        for name in required:
            if getattr(self, name) is None:
                raise ConfigError(
                    f"similarity kind {self.kind!r} requires {name}.", f"similarity.{name}"
                )
        self.build()

    def build(self, backend: BaseDistanceBackend | None = None) -> BaseSimilarity:
        """Return the similarity object described by the config."""
        if self.kind == "l2":
            return L2Similarity(self.tau, backend)  # type: ignore[arg-type]
        if self.kind == "cosine":
            return CosineSimilarity(self.tau, backend)  # type: ignore[arg-type]
        if self.kind == "sne":
            return SNESimilarity(self.tau, self.temperature, backend)  # type: ignore[arg-type]
        return KNNSimilarity(self.k, backend)  # type: ignore[arg-type]
