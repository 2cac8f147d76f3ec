"""Toy datasets with ground-truth labels."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from sklearn.datasets import make_blobs, make_moons

from lsdc._types import FloatArray
from lsdc.data.containers import FeatureMatrix, LabelVector
from lsdc.data.rng import RngState
from lsdc.errors import ConfigError


def gen_two_moons(
    n: int, noise_sigma: float, rng: RngState
) -> tuple[FeatureMatrix, LabelVector]:
    """Generate the two interleaving moons.

    The first n // 2 points lie on the upper unit half-circle centred at the
    origin (label 0), the remaining points on the lower unit half-circle centred
    at (1, 0.5) (label 1). Isotropic Gaussian noise of standard deviation
    noise_sigma is added to every coordinate.

    The lower curve is built as (1 - cos t, 1 - sin t) and then moved by -0.5
    vertically, so it is also described as the second moon "offset by
    (1, -0.5)": both name the half-circle centred at (1, 0.5).

    Args:
    ----
        n (int): Number of points, at least 2.
        noise_sigma (float): Noise standard deviation, non-negative.
        rng (RngState): Random state.

    Returns:
    -------
        tuple[FeatureMatrix, LabelVector]: The n x 2 points and their moon labels.

    """
    if n < 2:
        raise ConfigError(f"two moons needs n >= 2, got {n}.", "data.n")
    if noise_sigma < 0:
        raise ConfigError(f"noise must be non-negative, got {noise_sigma}.", "data.noise")
    x, y = make_moons(
        n_samples=n, shuffle=False, noise=noise_sigma, random_state=rng.sklearn_seed()
    )
    return FeatureMatrix(x.astype(np.float64)), LabelVector(y, n_classes=2)


def gen_blobs(
    n_per_cluster: int,
    centers: Sequence[Sequence[float]],
    sigma: float,
    rng: RngState,
) -> tuple[FeatureMatrix, LabelVector]:
    """Generate isotropic Gaussian blobs, n_per_cluster samples around each center.

    Samples are ordered by center and labelled with the center index.
    """
    centers_arr = np.asarray(centers, dtype=np.float64)
    if centers_arr.ndim != 2 or centers_arr.shape[0] < 2:
        raise ConfigError(
            f"blobs need at least 2 centers given as D-vectors, got shape {centers_arr.shape}.",
            "data.centers",
        )
    if sigma < 0:
        raise ConfigError(f"sigma must be non-negative, got {sigma}.", "data.sigma")
    if n_per_cluster < 1:
        raise ConfigError(f"n_per_cluster must be positive, got {n_per_cluster}.", "data.n")
    x, y = make_blobs(
        n_samples=[n_per_cluster] * centers_arr.shape[0],
        centers=centers_arr,
        cluster_std=sigma,
        shuffle=False,
        random_state=rng.sklearn_seed(),
    )
    return FeatureMatrix(x.astype(np.float64)), LabelVector(y, n_classes=centers_arr.shape[0])


def ring_centers(n_centers: int, radius: float = 3.0) -> FloatArray:
    """Return n_centers 2D points evenly spaced on a circle, the first on the x axis."""
    if n_centers < 2:
        raise ConfigError(f"need at least 2 centers, got {n_centers}.", "data.centers")
    angles = 2.0 * np.pi * np.arange(n_centers) / n_centers
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])
