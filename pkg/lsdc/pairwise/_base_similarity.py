"""Abstract similarity base class and the adjacency matrix it produces."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from lsdc._types import BoolArray, FloatArray
from lsdc.errors import DataError
from lsdc.pairwise.distances import BaseDistanceBackend, DistanceBackendNumpy


@dataclass(frozen=True)
class AdjacencyMatrix:
    """B x B binary matrix of pairwise pseudo labels for one minibatch.

    The matrix is symmetric and its diagonal is all ones: the pair (i, i) links
    a sample with its own augmented version.

    Attributes
    ----------
        a (BoolArray): The boolean adjacency matrix.

    """

    a: BoolArray

    def __post_init__(self):
        """Validate symmetry and the diagonal."""
        a = np.asarray(self.a, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError(f"adjacency must be square, got shape {a.shape}.")
        if not np.array_equal(a, a.T):
            raise DataError("adjacency must be symmetric.")
        if not a.diagonal().all():
            raise DataError("adjacency diagonal must be all ones.")
        object.__setattr__(self, "a", a)

    @property
    def size(self) -> int:
        """Return the batch size B."""
        return int(self.a.shape[0])

    @property
    def n_edges(self) -> int:
        """Return the number of undirected off-diagonal edges."""
        return int((self.a.sum() - self.size) // 2)

    def as_float(self, dtype: type[np.floating] = np.float64) -> FloatArray:
        """Return the matrix as 0/1 floats."""
        return self.a.astype(dtype)

    def permute(self, perm: np.ndarray) -> AdjacencyMatrix:
        """Return the adjacency of the batch reordered by perm on both axes."""
        return AdjacencyMatrix(self.a[np.ix_(perm, perm)])


class BaseSimilarity(ABC):
    """Abstract pairwise similarity.

    Concrete similarities decide which pairs are connected. This class holds
    the shared construction logic: input validation, symmetrisation of the
    connection relation and the forced diagonal.

    Args:
    ----
        backend (BaseDistanceBackend | None): Squared distance back-end. Defaults
            to DistanceBackendNumpy.

    """

    def __init__(self, backend: BaseDistanceBackend | None = None):
        """Initialise the BaseSimilarity."""
        self._backend = backend if backend is not None else DistanceBackendNumpy()

    @property
    def backend(self) -> BaseDistanceBackend:
        """Return the distance back-end."""
        return self._backend

    @property
    def min_batch_size(self) -> int:
        """Return the smallest batch the similarity accepts."""
        return 2

    @abstractmethod
    def _connections(self, features: FloatArray) -> BoolArray:
        """Return the (possibly directed) B x B connection relation.

        Args:
        ----
            features (FloatArray): Validated B x D batch.

        """
        pass

    def __call__(self, features: FloatArray) -> AdjacencyMatrix:
        """Build the adjacency matrix of a feature batch.

        Args:
        ----
            features (FloatArray): B x D batch of features or logits.

        Raises:
        ------
            DataError: If the batch is not 2D, holds fewer than min_batch_size
                rows or holds non-finite values.

        """
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2:
            raise DataError(f"similarity input must be 2D, got shape {x.shape}.")
        if x.shape[0] < self.min_batch_size:
            raise DataError(
                f"{self!r} needs at least {self.min_batch_size} samples, got {x.shape[0]}."
            )
        bad = ~np.isfinite(x).all(axis=1)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DataError(f"non-finite value in feature row {row}.", row=row)
        connected = np.asarray(self._connections(x), dtype=bool)
        connected = connected | connected.T
        np.fill_diagonal(connected, True)
        return AdjacencyMatrix(connected)

    def __repr__(self):
        """Return a string representation of the similarity."""
        return f"{self.__class__.__name__}"
