"""Clustering accuracy under the optimal cluster-to-class mapping."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from lsdc._types import FloatArray, IntArray
from lsdc.data import LabelVector
from lsdc.errors import ConfigError, DataError


def hungarian(cost: FloatArray) -> IntArray:
    """Return the permutation g minimising sum_i cost[i, g[i]].

    Raises
    ------
        DataError: If cost is not square or holds non-finite values.

    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise DataError(f"assignment cost must be square, got shape {cost.shape}.")
    if not np.isfinite(cost).all():
        raise DataError("assignment cost holds non-finite values.")
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(cost.shape[0], dtype=np.int64)
    assignment[rows] = cols
    return assignment


def _as_labels(labels: LabelVector | IntArray) -> IntArray:
    if isinstance(labels, LabelVector):
        return labels.labels
    return LabelVector(np.asarray(labels)).labels


def _n_classes(labels: LabelVector | IntArray, values: IntArray) -> int:
    if isinstance(labels, LabelVector) and labels.n_classes is not None:
        return labels.n_classes
    return int(values.max()) + 1 if values.size else 0


@dataclass(frozen=True)
class ContingencyMatrix:
    """Co-occurrence counts of predicted clusters and true classes.

    Attributes
    ----------
        counts (IntArray): Entry (c, y) counts samples predicted c with class y.

    """

    counts: IntArray

    @property
    def n_samples(self) -> int:
        """Return the total count N."""
        return int(self.counts.sum())

    def padded(self) -> IntArray:
        """Return the counts zero-padded to a square matrix."""
        size = max(self.counts.shape)
        out = np.zeros((size, size), dtype=self.counts.dtype)
        out[: self.counts.shape[0], : self.counts.shape[1]] = self.counts
        return out


def contingency(
    pred: LabelVector | IntArray, truth: LabelVector | IntArray, n_clusters: int
) -> ContingencyMatrix:
    """Count (predicted cluster, true class) pairs.

    Raises
    ------
        DataError: If the lengths differ or a prediction is not below n_clusters.

    """
    p = _as_labels(pred)
    y = _as_labels(truth)
    if p.shape != y.shape:
        raise DataError(f"{p.shape[0]} predictions for {y.shape[0]} labels.")
    if p.size and p.max() >= n_clusters:
        row = int(np.argmax(p >= n_clusters))
        raise DataError(f"prediction {p[row]} in row {row} is not below K={n_clusters}.", row=row)
    n_classes = max(_n_classes(truth, y), 1)
    counts = np.zeros((n_clusters, n_classes), dtype=np.int64)
    np.add.at(counts, (p, y), 1)
    return ContingencyMatrix(counts)


def clustering_accuracy(
    pred: LabelVector | IntArray, truth: LabelVector | IntArray, n_clusters: int
) -> tuple[float, IntArray]:
    """Return the best-mapping accuracy and the mapping from clusters to classes.

    The contingency matrix is padded to square so a cluster count different
    from the class count is allowed; mapping has the padded size.
    """
    table = contingency(pred, truth, n_clusters)
    counts = table.padded()
    mapping = hungarian(-counts)
    n = table.n_samples
    matched = int(counts[np.arange(counts.shape[0]), mapping].sum())
    return (matched / n if n else 0.0), mapping


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts of (mapped prediction, true class) pairs.

    Attributes
    ----------
        counts (IntArray): Entry (g(c), y) for prediction c and class y.
        mapping (IntArray): The cluster-to-class mapping g.

    """

    counts: IntArray
    mapping: IntArray

    @property
    def accuracy(self) -> float:
        """Return trace / N."""
        n = int(self.counts.sum())
        return float(np.trace(self.counts)) / n if n else 0.0


def confusion(
    pred: LabelVector | IntArray,
    truth: LabelVector | IntArray,
    mapping: IntArray,
    n_clusters: int,
) -> ConfusionMatrix:
    """Return the confusion matrix of predictions relabelled through mapping."""
    mapping = np.asarray(mapping, dtype=np.int64)
    if not np.array_equal(np.sort(mapping), np.arange(mapping.shape[0])):
        raise DataError(f"mapping {mapping.tolist()} is not a permutation.")
    counts = contingency(pred, truth, n_clusters).padded()
    if counts.shape[0] != mapping.shape[0]:
        raise DataError(
            f"mapping has {mapping.shape[0]} entries, expected {counts.shape[0]}."
        )
    mapped = np.zeros_like(counts)
    mapped[mapping] = counts
    return ConfusionMatrix(mapped, mapping)


def confident_subset(probs: FloatArray, threshold: float = 0.9) -> IntArray:
    """Return the rows whose largest probability is strictly above threshold."""
    if not 0 < threshold < 1:
        raise ConfigError(f"threshold must be in (0, 1), got {threshold}.", "threshold")
    probs = np.asarray(probs)
    return np.flatnonzero(probs.max(axis=1) > threshold)


def confident_accuracy(
    probs: FloatArray, truth: LabelVector | IntArray, threshold: float = 0.9
) -> tuple[float | None, int]:
    """Return the accuracy on the confident subset and its size.

    The mapping is solved on the subset itself. The accuracy is None when no
    sample passes the threshold.
    """
    probs = np.asarray(probs)
    y = _as_labels(truth)
    keep = confident_subset(probs, threshold)
    if keep.size == 0:
        return None, 0
    pred = probs[keep].argmax(axis=1)
    acc, _ = clustering_accuracy(pred, y[keep], probs.shape[1])
    return acc, int(keep.size)


def write_confusion_csv(path: str | Path, matrix: ConfusionMatrix) -> None:
    """Write a confusion matrix as CSV.

    Rows are true classes; columns are headed by the cluster mapped onto each
    class.
    """
    inverse = np.argsort(matrix.mapping)
    frame = pd.DataFrame(
        matrix.counts.T,
        index=[f"class_{y}" for y in range(matrix.counts.shape[1])],
        columns=[f"cluster_{c}" for c in inverse],
    )
    frame.to_csv(path, index_label="class")
