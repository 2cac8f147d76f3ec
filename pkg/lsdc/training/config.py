"""Run configuration of a clustering job."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from lsdc.composition import BetaParams
from lsdc.data import AUGMENT_MODES
from lsdc.errors import ConfigError
from lsdc.model import DEFAULT_HIDDEN, HEAD_KINDS
from lsdc.pairwise import SimilarityConfig

OptimizerKind = Literal["sgd", "adam"]
CompositionKind = Literal["none", "mixup", "ricap", "external_plan"]

OPTIMIZER_KINDS: tuple[str, ...] = ("sgd", "adam")
COMPOSITION_KINDS: tuple[str, ...] = ("none", "mixup", "ricap", "external_plan")
DTYPES: dict[str, type[np.floating]] = {"float64": np.float64, "float32": np.float32}
DISTANCE_BACKENDS: tuple[str, ...] = ("numpy", "numba")

DEFAULT_WEIGHT_DECAY = 5e-4
COMPOSITION_WEIGHT_DECAY = 1e-4


def _default_similarity() -> SimilarityConfig:
    return SimilarityConfig(kind="knn", k=10)


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters of a training run.

    Epoch-valued fields (lr_steps, ramp_len_epochs) are converted to optimiser
    steps by the trainer. weight_decay None resolves to 5e-4, or 1e-4 when a
    composition is active. backbone_hidden 0 keeps the input features frozen;
    a positive value trains a two-layer mini-backbone whose output dimension is
    backbone_out_dim, or the input dimension when that is 0.

    Raises
    ------
        ConfigError: Naming the offending field when a value or a combination
            of values is invalid.

    """

    similarity: SimilarityConfig = field(default_factory=_default_similarity)
    k_clusters: int = 10
    epochs: int = 100
    batch_size: int = 256
    optimizer: OptimizerKind = "sgd"
    lr_init: float = 0.1
    lr_steps: tuple[int, ...] = ()
    lr_decay_factor: float = 0.1
    momentum: float = 0.9
    weight_decay: float | None = None
    lambda_: float = 5.0
    ramp_len_epochs: int = 50
    composition: CompositionKind = "none"
    beta: BetaParams = field(default_factory=BetaParams)
    augment_mode: str = "gaussian_noise"
    augment_strength: float = 0.0
    mse_enabled: bool = True
    head_kind: str = "linear"
    head_hidden: int = DEFAULT_HIDDEN
    backbone_hidden: int = 0
    backbone_out_dim: int = 0
    dtype: str = "float64"
    distance_backend: str = "numpy"
    threads: int | None = None
    seed: int = 0
    report_path: str | None = None

    def __post_init__(self):
        """Validate every field and their combinations."""
        object.__setattr__(self, "lr_steps", tuple(int(s) for s in self.lr_steps))
        self._check(self.k_clusters >= 2, "k_clusters", f"must be >= 2, got {self.k_clusters}")
        self._check(self.epochs >= 1, "epochs", f"must be >= 1, got {self.epochs}")
        self._check(self.batch_size >= 2, "batch_size", f"must be >= 2, got {self.batch_size}")
        self._check(
            self.optimizer in OPTIMIZER_KINDS, "optimizer", f"unknown optimizer {self.optimizer!r}"
        )
        self._check(self.lr_init > 0, "lr_init", f"must be positive, got {self.lr_init}")
        steps = self.lr_steps
        self._check(
            all(0 <= s < self.epochs for s in steps)
            and all(a < b for a, b in zip(steps, steps[1:])),
            "lr_steps",
            f"must be strictly increasing epochs below {self.epochs}, got {list(steps)}",
        )
        self._check(
            self.lr_decay_factor > 0,
            "lr_decay_factor",
            f"must be positive, got {self.lr_decay_factor}",
        )
        self._check(0 <= self.momentum < 1, "momentum", f"must be in [0, 1), got {self.momentum}")
        self._check(
            self.weight_decay is None or self.weight_decay >= 0,
            "weight_decay",
            f"must be non-negative, got {self.weight_decay}",
        )
        self._check(self.lambda_ >= 0, "lambda", f"must be non-negative, got {self.lambda_}")
        self._check(
            self.ramp_len_epochs >= 1,
            "ramp_len_epochs",
            f"must be >= 1, got {self.ramp_len_epochs}",
        )
        self._check(
            self.composition in COMPOSITION_KINDS,
            "composition",
            f"unknown composition {self.composition!r}",
        )
        self._check(
            self.augment_mode in AUGMENT_MODES,
            "augment.mode",
            f"unknown augment mode {self.augment_mode!r}",
        )
        self._check(
            self.augment_strength >= 0
            and (self.augment_mode != "feature_dropout" or self.augment_strength < 1),
            "augment.strength",
            f"invalid strength {self.augment_strength} for {self.augment_mode}",
        )
        self._check(self.head_kind in HEAD_KINDS, "head.kind", f"unknown head {self.head_kind!r}")
        self._check(self.head_hidden >= 1, "head.hidden", f"must be >= 1, got {self.head_hidden}")
        self._check(
            self.backbone_hidden >= 0 and self.backbone_out_dim >= 0,
            "backbone.hidden",
            "backbone dimensions must be non-negative",
        )
        self._check(self.dtype in DTYPES, "dtype", f"unknown dtype {self.dtype!r}")
        self._check(
            self.distance_backend in DISTANCE_BACKENDS,
            "distance_backend",
            f"unknown distance backend {self.distance_backend!r}",
        )
        self._check(
            self.threads is None or self.threads >= 1,
            "threads",
            f"must be >= 1, got {self.threads}",
        )
        self._check(
            0 <= self.seed < 2**64, "seed", f"must be a 64-bit unsigned integer, got {self.seed}"
        )
        if self.similarity.kind == "knn":
            self._check(
                self.similarity.k < self.batch_size,  # type: ignore[operator]
                "similarity.k",
                f"k={self.similarity.k} must be below batch_size={self.batch_size}",
            )

    @staticmethod
    def _check(condition: bool, key: str, message: str) -> None:
        if not condition:
            raise ConfigError(f"{key}: {message}.", key)

    @property
    def effective_weight_decay(self) -> float:
        """Return the weight decay with the composition-dependent default applied."""
        if self.weight_decay is not None:
            return float(self.weight_decay)
        if self.composition in ("mixup", "ricap"):
            return COMPOSITION_WEIGHT_DECAY
        return DEFAULT_WEIGHT_DECAY

    @property
    def np_dtype(self) -> type[np.floating]:
        """Return the numpy dtype of features and parameters."""
        return DTYPES[self.dtype]


def lr_at(cfg: RunConfig, epoch: int) -> float:
    """Return the learning rate of an epoch under the step schedule.

    The rate is lr_init times lr_decay_factor to the number of listed steps at or
    before epoch, so a change takes effect at the start of the listed epoch.
    """
    if epoch < 0:
        raise ConfigError(f"epoch must be non-negative, got {epoch}.")
    n_decays = sum(1 for step in cfg.lr_steps if step <= epoch)
    return float(cfg.lr_init * cfg.lr_decay_factor**n_decays)
