"""Init file for evaluation module."""

from .metrics import (
    ContingencyMatrix,
    ConfusionMatrix,
    hungarian,
    contingency,
    clustering_accuracy,
    confusion,
    confident_subset,
    confident_accuracy,
    write_confusion_csv,
)

__all__ = [
    "ContingencyMatrix",
    "ConfusionMatrix",
    "hungarian",
    "contingency",
    "clustering_accuracy",
    "confusion",
    "confident_subset",
    "confident_accuracy",
    "write_confusion_csv",
]
