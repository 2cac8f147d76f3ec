"""Init file for losses module."""

from .pairwise_bce import (
    AGREEMENT_EPS,
    LossValue,
    PairTargetMatrix,
    pair_agreement,
    clustering_loss,
)
from .consistency import RampUp, consistency_mse, rampup_weight
from .total import LossTerms, total_loss_terms, total_loss

__all__ = [
    "AGREEMENT_EPS",
    "LossValue",
    "PairTargetMatrix",
    "pair_agreement",
    "clustering_loss",
    "RampUp",
    "consistency_mse",
    "rampup_weight",
    "LossTerms",
    "total_loss_terms",
    "total_loss",
]
