"""Init file for composition module."""

from .plans import (
    BetaParams,
    CompositePlan,
    sample_beta,
    mixup_compose,
    ricap_compose,
)
from .targets import composite_targets, composite_clustering_loss

__all__ = [
    "BetaParams",
    "CompositePlan",
    "sample_beta",
    "mixup_compose",
    "ricap_compose",
    "composite_targets",
    "composite_clustering_loss",
]
