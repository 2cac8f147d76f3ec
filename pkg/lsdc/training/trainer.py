"""The clustering training loop."""

from __future__ import annotations

import json
import logging
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from lsdc._types import FloatArray, ParamDict
from lsdc.composition import CompositePlan, composite_targets, mixup_compose, ricap_compose
from lsdc.data import (
    FeatureMatrix,
    LabelVector,
    Minibatch,
    RngState,
    augment,
    make_minibatch,
)
from lsdc.errors import ConfigError, DataError
from lsdc.evaluation import clustering_accuracy
from lsdc.losses import LossTerms, PairTargetMatrix, RampUp, total_loss_terms
from lsdc.model import ClassifierHead, MLPBackbone, init_backbone, init_head
from lsdc.pairwise import AdjacencyMatrix, BaseSimilarity, make_distance_backend
from lsdc.training._base_optimiser import BaseOptimiser
from lsdc.training.config import RunConfig, lr_at
from lsdc.training.optimisers import make_optimiser

logger = logging.getLogger(__name__)

PlanFn = Callable[[FloatArray, RngState], CompositePlan]


@dataclass(frozen=True)
class EpochRecord:
    """Summary of one training epoch.

    Loss values are means over the epoch's optimiser steps; omega is the weight
    of the epoch's last step.
    """

    epoch: int
    lr: float
    omega: float
    loss_clus: float
    loss_cons: float
    loss_total: float
    n_steps: int
    n_edges: int
    acc: float | None = None

    def to_json(self) -> str:
        """Return the record as one JSON line."""
        record = asdict(self)
        if record["acc"] is None:
            del record["acc"]
        return json.dumps(record)


def predict_proba(
    head: ClassifierHead, features: FloatArray, backbone: MLPBackbone | None = None
) -> FloatArray:
    """Return the N x K cluster probabilities of a trained model."""
    f = features if backbone is None else backbone.forward(features)
    return head.forward(f)[1]


@dataclass(frozen=True)
class TrainReport:
    """Outcome of a training run.

    Attributes
    ----------
        records (tuple[EpochRecord, ...]): One record per epoch.
        head (ClassifierHead): The trained head.
        backbone (MLPBackbone | None): The trained mini-backbone, if any.
        omega_trace (tuple[float, ...]): Consistency weight of every step.
        step_losses (tuple[float, ...]): Total loss of every step.

    """

    records: tuple[EpochRecord, ...]
    head: ClassifierHead
    backbone: MLPBackbone | None
    omega_trace: tuple[float, ...]
    step_losses: tuple[float, ...]

    def predict(self, features: FeatureMatrix | FloatArray) -> FloatArray:
        """Return cluster probabilities for new features."""
        x = features.data if isinstance(features, FeatureMatrix) else np.asarray(features)
        return predict_proba(self.head, x.astype(self.head.dtype), self.backbone)

    @property
    def final_acc(self) -> float | None:
        """Return the accuracy of the last epoch when labels were given."""
        return self.records[-1].acc if self.records else None

    def lines(self) -> list[str]:
        """Return the report as JSON lines."""
        return [record.to_json() for record in self.records]


@dataclass(frozen=True)
class _StepResult:
    terms: LossTerms
    n_edges: int


def steps_per_epoch(n_samples: int, batch_size: int, min_batch: int) -> int:
    """Return the number of minibatches kept per epoch."""
    full, rest = divmod(n_samples, batch_size)
    if full == 0:
        return 1 if n_samples >= min_batch else 0
    return full + (1 if rest >= min_batch else 0)


@contextmanager
def _report_stream(path: str | None) -> Iterator[TextIO | None]:
    if path is None:
        yield None
        return
    with Path(path).open("w", encoding="utf-8") as stream:
        yield stream


class Trainer:
    """Owns the model, optimiser and random streams of one run.

    Args:
    ----
        features (FeatureMatrix): The N x D training features.
        cfg (RunConfig): The run configuration.
        labels (LabelVector | None): Ground truth, only used for reporting.
        plan_fn (PlanFn | None): Composite-plan builder for
            composition="external_plan".

    """

    def __init__(
        self,
        features: FeatureMatrix,
        cfg: RunConfig,
        labels: LabelVector | None = None,
        plan_fn: PlanFn | None = None,
    ):
        """Initialise the Trainer."""
        if cfg.composition == "external_plan" and plan_fn is None:
            raise ConfigError("composition=external_plan requires a plan function.", "composition")
        if labels is not None and len(labels) != features.n_samples:
            raise DataError(
                f"{len(labels)} labels for {features.n_samples} feature rows."
            )
        self._cfg = cfg
        self._x = features.astype(cfg.np_dtype)
        self._labels = labels
        self._plan_fn = plan_fn

        init_rng, self._shuffle_rng, self._augment_rng, self._compose_rng = RngState(
            cfg.seed
        ).spawn(4)
        backend = make_distance_backend(cfg.distance_backend, cfg.threads)
        self._similarity: BaseSimilarity = cfg.similarity.build(backend)
        self._min_batch = max(2, self._similarity.min_batch_size)
        self._batch_size = min(cfg.batch_size, self._x.n_samples)
        self._steps_per_epoch = steps_per_epoch(
            self._x.n_samples, cfg.batch_size, self._min_batch
        )
        if self._steps_per_epoch == 0:
            raise DataError(
                f"{self._x.n_samples} samples cannot fill a minibatch of at least "
                f"{self._min_batch} samples."
            )

        dim = self._x.dim
        self._backbone: MLPBackbone | None = None
        if cfg.backbone_hidden > 0:
            out_dim = cfg.backbone_out_dim or dim
            self._backbone = init_backbone(
                dim, cfg.backbone_hidden, out_dim, init_rng, cfg.np_dtype
            )
            dim = out_dim
        self._head = init_head(
            cfg.head_kind, dim, cfg.head_hidden, cfg.k_clusters, init_rng, cfg.np_dtype
        )
        self._optimiser: BaseOptimiser = make_optimiser(cfg)
        self._ramp = (
            RampUp(cfg.lambda_, cfg.ramp_len_epochs * self._steps_per_epoch)
            if cfg.lambda_ > 0
            else None
        )
        self._step = 0

    @property
    def head(self) -> ClassifierHead:
        """Return the classifier head."""
        return self._head

    @property
    def backbone(self) -> MLPBackbone | None:
        """Return the mini-backbone, None when features are frozen."""
        return self._backbone

    @property
    def steps_per_epoch(self) -> int:
        """Return the number of optimiser steps per epoch."""
        return self._steps_per_epoch

    def omega(self, step: int) -> float:
        """Return the consistency weight at an optimiser step."""
        return 0.0 if self._ramp is None else self._ramp.weight(step)

    def _params(self) -> ParamDict:
        params = {f"head.{k}": v for k, v in self._head.params.items()}
        if self._backbone is not None:
            params.update({f"backbone.{k}": v for k, v in self._backbone.params.items()})
        return params

    def _set_params(self, params: ParamDict) -> None:
        self._head.set_params(
            {k.removeprefix("head."): v for k, v in params.items() if k.startswith("head.")}
        )
        if self._backbone is not None:
            self._backbone.set_params(
                {
                    k.removeprefix("backbone."): v
                    for k, v in params.items()
                    if k.startswith("backbone.")
                }
            )

    def _second_branch(self, batch: FloatArray) -> tuple[FloatArray, CompositePlan | None]:
        cfg = self._cfg
        if cfg.composition == "none":
            return augment(batch, cfg.augment_mode, cfg.augment_strength, self._augment_rng), None
        if cfg.composition == "mixup":
            plan = mixup_compose(batch, self._compose_rng, cfg.beta)
        elif cfg.composition == "ricap":
            plan = ricap_compose(batch, self._compose_rng, cfg.beta)
        else:
            plan = self._plan_fn(batch, self._compose_rng)  # type: ignore[misc]
        return plan.composite_features.astype(batch.dtype), plan

    def _embed(self, x: FloatArray) -> FloatArray:
        return x if self._backbone is None else self._backbone.forward(x)

    def train_step(
        self, minibatch: Minibatch, plan: CompositePlan | None, lr: float
    ) -> _StepResult:
        """Run one forward, backward and update pass on a minibatch.

        The adjacency is built from the raw branch and treated as a constant.
        """
        cfg = self._cfg
        x, x_aug = minibatch.features, minibatch.augmented_features
        f, f_aug = self._embed(x), self._embed(x_aug)
        logits, p = self._head.forward(f)
        _, p_aug = self._head.forward(f_aug)

        space = f if cfg.similarity.space == "feature" else logits
        adjacency: AdjacencyMatrix = self._similarity(space)
        if plan is None:
            targets = PairTargetMatrix.from_adjacency(adjacency)
        else:
            targets = composite_targets(adjacency, plan)
        omega = self.omega(self._step)
        terms = total_loss_terms(p, p_aug, targets, omega, cfg.k_clusters, cfg.mse_enabled)
        if not np.isfinite(terms.total.value):
            raise DataError(f"loss became non-finite at step {self._step}.")

        head_raw = self._head.backward(f, terms.total.grad_p)
        head_aug = self._head.backward(f_aug, terms.total.grad_p_prime)
        grads = {f"head.{k}": head_raw.params[k] + head_aug.params[k] for k in head_raw.params}
        if self._backbone is not None:
            bb_raw = self._backbone.backward(x, head_raw.inputs)
            bb_aug = self._backbone.backward(x_aug, head_aug.inputs)
            grads.update(
                {f"backbone.{k}": bb_raw.params[k] + bb_aug.params[k] for k in bb_raw.params}
            )
        self._set_params(self._optimiser.step(self._params(), grads, lr))

        logger.debug(
            "step %d: loss %.6f (clus %.6f, cons %.6f), omega %.4f, %d edges",
            self._step,
            terms.total.value,
            terms.clustering.value,
            terms.consistency.value,
            omega,
            adjacency.n_edges,
        )
        self._step += 1
        return _StepResult(terms, adjacency.n_edges)

    def _epoch_batches(self) -> Iterator[np.ndarray]:
        order = self._shuffle_rng.generator.permutation(self._x.n_samples)
        for start in range(0, order.shape[0], self._batch_size):
            indices = order[start : start + self._batch_size]
            if indices.shape[0] < self._min_batch:
                logger.debug("dropping partial minibatch of %d samples", indices.shape[0])
                continue
            yield indices

    def accuracy(self) -> float:
        """Return the clustering accuracy on the training features."""
        if self._labels is None:
            raise DataError("accuracy requires labels.")
        probs = predict_proba(self._head, self._x.data, self._backbone)
        acc, _ = clustering_accuracy(probs.argmax(axis=1), self._labels, self._cfg.k_clusters)
        return acc

    def run(self) -> TrainReport:
        """Train for cfg.epochs epochs and return the report."""
        cfg = self._cfg
        records: list[EpochRecord] = []
        omegas: list[float] = []
        step_losses: list[float] = []
        logger.info(
            "training %s head on %d x %d features, K=%d, %d steps per epoch",
            cfg.head_kind,
            self._x.n_samples,
            self._x.dim,
            cfg.k_clusters,
            self._steps_per_epoch,
        )
        with _report_stream(cfg.report_path) as stream:
            for epoch in range(cfg.epochs):
                lr = lr_at(cfg, epoch)
                sums = np.zeros(3)
                n_steps = n_edges = 0
                for indices in self._epoch_batches():
                    batch = self._x.data[indices]
                    second, plan = self._second_branch(batch)
                    omegas.append(self.omega(self._step))
                    result = self.train_step(make_minibatch(self._x, indices, second), plan, lr)
                    terms = result.terms
                    sums += (terms.clustering.value, terms.consistency.value, terms.total.value)
                    step_losses.append(terms.total.value)
                    n_steps += 1
                    n_edges += result.n_edges
                means = sums / n_steps
                record = EpochRecord(
                    epoch=epoch,
                    lr=lr,
                    omega=omegas[-1],
                    loss_clus=float(means[0]),
                    loss_cons=float(means[1]),
                    loss_total=float(means[2]),
                    n_steps=n_steps,
                    n_edges=n_edges,
                    acc=None if self._labels is None else self.accuracy(),
                )
                records.append(record)
                if stream is not None:
                    stream.write(record.to_json() + "\n")
                    stream.flush()
                logger.info(
                    "epoch %d: lr %.4g, omega %.4f, loss %.6f%s",
                    epoch,
                    lr,
                    record.omega,
                    record.loss_total,
                    "" if record.acc is None else f", acc {record.acc:.4f}",
                )
        return TrainReport(
            tuple(records), self._head, self._backbone, tuple(omegas), tuple(step_losses)
        )


def train(
    features: FeatureMatrix,
    cfg: RunConfig,
    labels: LabelVector | None = None,
    plan_fn: PlanFn | None = None,
) -> TrainReport:
    """Train a clustering head (and optional mini-backbone) on features.

    Each epoch shuffles the samples with the seeded state, then for every kept
    minibatch builds the adjacency of the raw branch, forms the second branch by
    augmentation or composition, and takes one optimiser step on the clustering
    loss plus the ramped consistency term.

    Args:
    ----
        features (FeatureMatrix): The N x D features.
        cfg (RunConfig): The run configuration.
        labels (LabelVector | None): Optional ground truth for per-epoch accuracy.
        plan_fn (PlanFn | None): Plan builder for composition="external_plan".

    Returns:
    -------
        TrainReport: Per-epoch records and the trained model.

    Raises:
    ------
        ConfigError: For a configuration that cannot run, before any step.
        DataError: For labels of the wrong length, a dataset too small for one
            minibatch or a diverging loss.

    """
    return Trainer(features, cfg, labels, plan_fn).run()
