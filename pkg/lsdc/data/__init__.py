"""Init file for data module."""

from .rng import RngState
from .containers import FeatureMatrix, LabelVector, Minibatch, make_minibatch
from .io import load_features, save_features
from .generators import gen_two_moons, gen_blobs, ring_centers
from .augment import augment, AUGMENT_MODES

__all__ = [
    "RngState",
    "FeatureMatrix",
    "LabelVector",
    "Minibatch",
    "make_minibatch",
    "load_features",
    "save_features",
    "gen_two_moons",
    "gen_blobs",
    "ring_centers",
    "augment",
    "AUGMENT_MODES",
]
