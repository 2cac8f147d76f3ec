"""Pairwise squared Euclidean distance back-ends."""

from abc import ABC, abstractmethod
import logging

import numpy as np
from numba import njit, prange, set_num_threads  # type: ignore
from scipy.spatial.distance import cdist

from lsdc._types import FloatArray
from lsdc.errors import ConfigError

logger = logging.getLogger(__name__)


class BaseDistanceBackend(ABC):
    """Abstract class for squared distance back-ends used by the similarities."""

    name: str = "base"

    @abstractmethod
    def squared_distances(self, features: FloatArray) -> FloatArray:
        """Return the B x B matrix of squared Euclidean distances.

        The diagonal is exactly zero and the matrix is exactly symmetric.

        Args:
        ----
            features (FloatArray): B x D feature batch.

        """
        pass

    @staticmethod
    def _symmetrise(d2: FloatArray) -> FloatArray:
        d2 = np.minimum(d2, d2.T)
        np.fill_diagonal(d2, 0.0)
        return d2


class DistanceBackendNumpy(BaseDistanceBackend):
    """Back-end based on scipy cdist."""

    name = "numpy"

    def __init__(self):
        """Initialise DistanceBackendNumpy."""
        pass

    def squared_distances(self, features: FloatArray) -> FloatArray:
        """Return the squared distance matrix computed by cdist."""
        x = np.asarray(features, dtype=np.float64)
        return self._symmetrise(cdist(x, x, metric="sqeuclidean"))


def _squared_distances_kernel(x: FloatArray) -> FloatArray:
    n, d = x.shape
    out = np.empty((n, n), dtype=np.float64)
    for i in prange(n):
        for j in range(n):
            total = 0.0
            for k in range(d):
                diff = x[i, k] - x[j, k]
                total += diff * diff
            out[i, j] = total
    return out


class DistanceBackendNumba(BaseDistanceBackend):
    """Back-end based on a numba kernel parallelised over rows.

    Each entry is accumulated by a single thread in a fixed order, so the output
    does not depend on the number of threads.

    Args:
    ----
        threads (int | None): Number of numba threads. Defaults to numba's choice.

    """

    name = "numba"

    def __init__(self, threads: int | None = None):
        """Initialise DistanceBackendNumba."""
        if threads is not None:
            set_num_threads(threads)
        self._threads = threads
        self._kernel = njit(parallel=True)(_squared_distances_kernel)  # type: ignore

    @property
    def threads(self) -> int | None:
        """Return the requested thread count."""
        return self._threads

    def squared_distances(self, features: FloatArray) -> FloatArray:
        """Return the squared distance matrix computed by the numba kernel."""
        x = np.ascontiguousarray(features, dtype=np.float64)
        return self._symmetrise(self._kernel(x))


def make_distance_backend(name: str = "numpy", threads: int | None = None) -> BaseDistanceBackend:
    """Return the back-end registered under name."""
    if name == "numpy":
        if threads not in (None, 1):
            logger.debug("numpy distance back-end ignores threads=%s", threads)
        return DistanceBackendNumpy()
    if name == "numba":
        return DistanceBackendNumba(threads)
    raise ConfigError(f"unknown distance back-end {name!r}.", "distance_backend")


def pairwise_sq_distances(
    features: FloatArray, backend: BaseDistanceBackend | None = None
) -> FloatArray:
    """Return squared Euclidean distances with the given (default numpy) back-end."""
    backend = backend if backend is not None else DistanceBackendNumpy()
    return backend.squared_distances(features)
