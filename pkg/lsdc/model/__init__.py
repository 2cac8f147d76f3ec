"""Init file for model module."""

from ._base_head import (
    ClassifierHead,
    TrainableBlock,
    HeadGradients,
    softmax,
    softmax_backward,
)
from .heads import (
    LinearHead,
    TwoLayerHead,
    MLPBackbone,
    HEAD_KINDS,
    DEFAULT_HIDDEN,
    init_head,
    init_backbone,
    forward,
    backward,
)
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "ClassifierHead",
    "TrainableBlock",
    "HeadGradients",
    "softmax",
    "softmax_backward",
    "LinearHead",
    "TwoLayerHead",
    "MLPBackbone",
    "HEAD_KINDS",
    "DEFAULT_HIDDEN",
    "init_head",
    "init_backbone",
    "forward",
    "backward",
    "save_checkpoint",
    "load_checkpoint",
]
