"""Command-line entry point: train, eval, kmeans, gen and edges."""

from __future__ import annotations

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from lsdc.baselines import kmeans
from lsdc.cli.config_file import ConfigFile, DataSource, preset_names
from lsdc.data import (
    FeatureMatrix,
    LabelVector,
    RngState,
    gen_blobs,
    gen_two_moons,
    load_features,
    ring_centers,
    save_features,
)
from lsdc.errors import ConfigError, DataError
from lsdc.evaluation import (
    clustering_accuracy,
    confident_accuracy,
    confident_subset,
    confusion,
    write_confusion_csv,
)
from lsdc.model import load_checkpoint, save_checkpoint
from lsdc.pairwise import (
    SIMILARITY_KINDS,
    SimilarityConfig,
    build_adjacency,
    calibrate_threshold,
    make_distance_backend,
    write_edge_list,
)
from lsdc.training import predict_proba, train

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

REPORT_NAME = "report.jsonl"
CHECKPOINT_NAME = "head.lsdh"
CONFUSION_NAME = "confusion.csv"


def generate(source: DataSource, seed: int) -> tuple[FeatureMatrix, LabelVector]:
    """Generate the toy dataset described by a data source."""
    rng = RngState(seed)
    if source.source == "moons":
        return gen_two_moons(source.n, source.noise, rng)
    if source.source == "blobs":
        n_per_cluster = max(source.n // source.centers, 1)
        centers = ring_centers(source.centers, source.radius)
        return gen_blobs(n_per_cluster, centers, source.sigma, rng)
    raise ConfigError(f"{source.source!r} is not a generator.", "data.source")


def load_dataset(source: DataSource, seed: int) -> tuple[FeatureMatrix, LabelVector | None]:
    """Load or generate the features of a data source."""
    if source.source == "file":
        return load_features(source.path, source.format, source.labels)  # type: ignore[arg-type]
    return generate(source, seed)


def _print_accuracy(
    pred: np.ndarray, labels: LabelVector, n_clusters: int, confusion_path: Path | None
) -> float:
    acc, mapping = clustering_accuracy(pred, labels, n_clusters)
    print(f"acc {acc:.6f}")
    if confusion_path is not None:
        write_confusion_csv(confusion_path, confusion(pred, labels, mapping, n_clusters))
        print(f"confusion {confusion_path}")
    return acc


def cmd_train(args: argparse.Namespace) -> int:
    """Train on the configured data and write the report, checkpoint and confusion."""
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"threads={args.threads}")
    out_dir = Path(args.out)
    base = ConfigFile.from_path(args.config)
    if "output.report" not in base.values and not any(
        o.startswith("output.report") for o in overrides
    ):
        overrides.append(f"output.report={out_dir / REPORT_NAME}")
    config = base.with_overrides(overrides)
    cfg = config.run_config
    out_dir.mkdir(parents=True, exist_ok=True)

    features, labels = load_dataset(config.data, cfg.seed)
    report = train(features, cfg, labels)

    checkpoint = Path(config.outputs.checkpoint or out_dir / CHECKPOINT_NAME)
    save_checkpoint(checkpoint, report.head, report.backbone)
    print(f"report {cfg.report_path}")
    print(f"checkpoint {checkpoint}")
    final = report.records[-1]
    print(f"loss {final.loss_total:.6f}")
    if labels is not None:
        pred = report.predict(features).argmax(axis=1)
        confusion_path = Path(config.outputs.confusion or out_dir / CONFUSION_NAME)
        _print_accuracy(pred, labels, cfg.k_clusters, confusion_path)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    """Evaluate a checkpoint on a feature file."""
    head, backbone = load_checkpoint(args.checkpoint)
    features, labels = load_features(args.features, args.format, args.csv_labels)
    probs = predict_proba(head, features.data, backbone)
    confident = confident_subset(probs, args.threshold)
    print(f"confident {confident.size} of {features.n_samples}")
    if labels is not None:
        out = None if args.out is None else Path(args.out)
        _print_accuracy(probs.argmax(axis=1), labels, head.n_clusters, out)
        subset_acc, _ = confident_accuracy(probs, labels, args.threshold)
        if subset_acc is not None:
            print(f"confident_acc {subset_acc:.6f}")
    return EXIT_OK


def cmd_kmeans(args: argparse.Namespace) -> int:
    """Run the k-means baseline."""
    if args.features is not None:
        features, labels = load_features(args.features, args.format, args.csv_labels)
        n_clusters = args.k
        seed = 0 if args.seed is None else args.seed
    else:
        config = ConfigFile.from_path(args.config)
        if args.seed is not None:
            config = config.with_overrides([f"seed={args.seed}"])
        seed = config.run_config.seed
        features, labels = load_dataset(config.data, seed)
        n_clusters = args.k or config.run_config.k_clusters
    if n_clusters is None:
        raise ConfigError("kmeans needs --k with --features.", "k_clusters")
    model = kmeans(features, n_clusters, args.max_iter, args.tol, RngState(seed))
    print(f"inertia {model.inertia:.6f}")
    print(f"iterations {model.n_iter}")
    if labels is not None:
        _print_accuracy(model.assignments, labels, n_clusters, None)
    if args.out is not None:
        pd.DataFrame({"cluster": model.assignments}).to_csv(args.out, index_label="sample")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate a toy dataset with labels."""
    source = DataSource(
        source=args.kind,
        n=args.n,
        noise=args.noise,
        centers=args.centers,
        radius=args.radius,
        sigma=args.sigma,
    )
    features, labels = generate(source, 0 if args.seed is None else args.seed)
    save_features(args.out, features, labels, args.format)
    print(f"wrote {features.n_samples} x {features.dim} to {args.out}")
    return EXIT_OK


def cmd_edges(args: argparse.Namespace) -> int:
    """Write the adjacency of a whole feature file as an undirected edge list."""
    features, _ = load_features(args.features, args.format, args.csv_labels)
    backend = make_distance_backend(args.backend, args.threads)
    tau, k = args.tau, args.k
    if args.n_edges is not None:
        value = calibrate_threshold(
            args.kind, features.data, args.n_edges, args.temperature, backend
        )
        if args.kind == "knn":
            k = int(value)
        else:
            tau = value
        print(f"calibrated {'k' if args.kind == 'knn' else 'tau'} {value:.10g}")
    cfg = SimilarityConfig(kind=args.kind, tau=tau, temperature=args.temperature, k=k)
    adjacency = build_adjacency(cfg, features.data, backend)
    n_edges = write_edge_list(args.out, adjacency)
    print(f"edges {n_edges}")
    return EXIT_OK


def _add_feature_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--features", required=required, help="feature file")
    parser.add_argument("--format", choices=("binary", "csv"), default="binary")
    parser.add_argument(
        "--csv-labels", action="store_true", help="the last csv column holds labels"
    )


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the lsdc command."""
    parser = argparse.ArgumentParser(
        prog="lsdc", description="Clustering with pairwise pseudo labels in feature space."
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        type=str.upper,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p_train = commands.add_parser(
        "train", help=f"train from a config file or preset ({', '.join(preset_names())})"
    )
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--threads", type=int)
    p_train.add_argument("--out", default=".", help="output directory")
    p_train.set_defaults(func=cmd_train)

    p_eval = commands.add_parser("eval", help="evaluate a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    _add_feature_args(p_eval)
    p_eval.add_argument("--threshold", type=float, default=0.9)
    p_eval.add_argument("--out", help="confusion csv path")
    p_eval.set_defaults(func=cmd_eval)

    p_kmeans = commands.add_parser("kmeans", help="k-means baseline")
    _add_feature_args(p_kmeans, required=False)
    p_kmeans.add_argument("--config", default="blobs")
    p_kmeans.add_argument("--k", type=int)
    p_kmeans.add_argument("--seed", type=int)
    p_kmeans.add_argument("--max-iter", type=int, default=300)
    p_kmeans.add_argument("--tol", type=float, default=1e-6)
    p_kmeans.add_argument("--out", help="assignments csv path")
    p_kmeans.set_defaults(func=cmd_kmeans)

    p_gen = commands.add_parser("gen", help="generate a toy dataset")
    p_gen.add_argument("kind", choices=("moons", "blobs"))
    p_gen.add_argument("--n", type=int, default=1000)
    p_gen.add_argument("--noise", type=float, default=0.05)
    p_gen.add_argument("--centers", type=int, default=4)
    p_gen.add_argument("--radius", type=float, default=3.0)
    p_gen.add_argument("--sigma", type=float, default=0.15)
    p_gen.add_argument("--seed", type=int)
    p_gen.add_argument("--format", choices=("binary", "csv"), default="binary")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_edges = commands.add_parser("edges", help="export the adjacency as an edge list")
    _add_feature_args(p_edges)
    p_edges.add_argument("--kind", choices=SIMILARITY_KINDS, default="knn")
    p_edges.add_argument("--tau", type=float)
    p_edges.add_argument("--temperature", type=float)
    p_edges.add_argument("--k", type=int)
    p_edges.add_argument("--n-edges", type=int, help="calibrate tau or k to this edge count")
    p_edges.add_argument("--backend", choices=("numpy", "numba"), default="numpy")
    p_edges.add_argument("--threads", type=int)
    p_edges.add_argument("--out", required=True)
    p_edges.set_defaults(func=cmd_edges)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the lsdc command and return its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        logger.error("configuration error%s: %s", key, exc)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        logger.error("data error: %s", exc)
        return EXIT_DATA
