"""Core numeric containers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lsdc._types import FloatArray, IntArray
from lsdc.errors import DataError


def _first_non_finite_row(data: FloatArray) -> int | None:
    bad = ~np.isfinite(data).all(axis=1)
    if bad.any():
        return int(np.flatnonzero(bad)[0])
    return None


@dataclass(frozen=True)
class FeatureMatrix:
    """N x D matrix of per-sample embeddings.

    Row i is the feature vector of sample i, the space where pairwise labels are
    extracted.

    Attributes
    ----------
        data (FloatArray): The N x D matrix.

    Raises
    ------
        DataError: If the matrix is not 2D, is empty or holds non-finite values.

    """

    data: FloatArray

    def __post_init__(self):
        """Validate shape and finiteness."""
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise DataError(f"feature matrix must be 2D, got shape {data.shape}.")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise DataError(f"feature matrix must be non-empty, got shape {data.shape}.")
        if not np.issubdtype(data.dtype, np.floating):
            data = data.astype(np.float64)
        row = _first_non_finite_row(data)
        if row is not None:
            raise DataError(f"non-finite value in feature row {row}.", row=row)
        object.__setattr__(self, "data", data)

    @property
    def n_samples(self) -> int:
        """Return the number of samples N."""
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        """Return the feature dimension D."""
        return int(self.data.shape[1])

    def astype(self, dtype: type[np.floating]) -> FeatureMatrix:
        """Return a copy with the given floating dtype."""
        return FeatureMatrix(self.data.astype(dtype))


@dataclass(frozen=True)
class LabelVector:
    """Ground-truth class indices in [0, n_classes).

    Attributes
    ----------
        labels (IntArray): Length-N vector of class indices.
        n_classes (int | None): K_true; inferred as max + 1 when omitted.

    """

    labels: IntArray
    n_classes: int | None = None

    def __post_init__(self):
        """Validate the label range."""
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise DataError(f"labels must be 1D, got shape {labels.shape}.")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            raise DataError(f"labels must be integers, got dtype {labels.dtype}.")
        labels = labels.astype(np.int64)
        if labels.size and labels.min() < 0:
            row = int(np.argmin(labels))
            raise DataError(f"negative label in row {row}.", row=row)
        n_classes = self.n_classes
        if n_classes is None:
            n_classes = int(labels.max()) + 1 if labels.size else 0
        elif labels.size and labels.max() >= n_classes:
            row = int(np.argmax(labels))
            raise DataError(
                f"label {labels[row]} in row {row} is not below {n_classes}.", row=row
            )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", n_classes)

    def __len__(self) -> int:
        """Return the number of labels."""
        return int(self.labels.shape[0])


@dataclass(frozen=True)
class Minibatch:
    """A minibatch and its augmented counterpart realised in feature space.

    Attributes
    ----------
        indices (IntArray): Length-B distinct sample indices.
        features (FloatArray): B x D raw features.
        augmented_features (FloatArray): B x D augmented (or composite) features.

    """

    indices: IntArray
    features: FloatArray
    augmented_features: FloatArray

    def __post_init__(self):
        """Validate the batch invariants."""
        if self.indices.shape[0] < 2:
            raise DataError(f"minibatch needs at least 2 samples, got {self.indices.shape[0]}.")
        if np.unique(self.indices).shape[0] != self.indices.shape[0]:
            raise DataError("minibatch indices must be distinct.")
        if self.features.shape != self.augmented_features.shape:
            raise DataError(
                f"augmented features {self.augmented_features.shape} do not match "
                f"features {self.features.shape}."
            )
        if self.features.shape[0] != self.indices.shape[0]:
            raise DataError("minibatch features and indices disagree on the batch size.")

    @property
    def size(self) -> int:
        """Return the batch size B."""
        return int(self.indices.shape[0])


def make_minibatch(
    features: FeatureMatrix, indices: IntArray, augmented: FloatArray
) -> Minibatch:
    """Build a Minibatch from a FeatureMatrix and the rows selected by indices."""
    indices = np.asarray(indices, dtype=np.int64)
    return Minibatch(indices, features.data[indices], augmented)
