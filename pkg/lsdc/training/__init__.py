"""Init file for training module."""

from .config import (
    RunConfig,
    lr_at,
    OPTIMIZER_KINDS,
    COMPOSITION_KINDS,
    DEFAULT_WEIGHT_DECAY,
    COMPOSITION_WEIGHT_DECAY,
)
from ._base_optimiser import OptimizerState, BaseOptimiser
from .optimisers import (
    sgd_step,
    adam_step,
    SGDMomentumOptimiser,
    AdamOptimiser,
    make_optimiser,
)
from .trainer import (
    EpochRecord,
    TrainReport,
    Trainer,
    PlanFn,
    predict_proba,
    steps_per_epoch,
    train,
)

__all__ = [
    "RunConfig",
    "lr_at",
    "OPTIMIZER_KINDS",
    "COMPOSITION_KINDS",
    "DEFAULT_WEIGHT_DECAY",
    "COMPOSITION_WEIGHT_DECAY",
    "OptimizerState",
    "BaseOptimiser",
    "sgd_step",
    "adam_step",
    "SGDMomentumOptimiser",
    "AdamOptimiser",
    "make_optimiser",
    "EpochRecord",
    "TrainReport",
    "Trainer",
    "PlanFn",
    "predict_proba",
    "steps_per_epoch",
    "train",
]
