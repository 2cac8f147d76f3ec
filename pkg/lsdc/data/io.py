"""Feature file ingestion and export.

Two formats are supported:

* binary: the magic bytes ``LSDC`` then little-endian u32 N, u32 D and u32
  label_flag, then N x D little-endian float32 values in row-major order and, if
  label_flag is 1, N little-endian u32 labels.
* csv: one sample per row, comma-separated decimals, with an optional final
  integer column holding the label.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd

from lsdc.data.containers import FeatureMatrix, LabelVector
from lsdc.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"LSDC"

FeatureFormat = Literal["binary", "csv"]

HEADER_DTYPE = np.dtype(
    [("magic", "S4"), ("n", "<u4"), ("d", "<u4"), ("label_flag", "<u4")]
)


def _check_format(fmt: str) -> None:
    if fmt not in ("binary", "csv"):
        raise ConfigError(f"unknown feature format {fmt!r}.", "data.format")


def load_features(
    path: str | Path, fmt: FeatureFormat = "binary", with_labels: bool = False
) -> tuple[FeatureMatrix, LabelVector | None]:
    """Load a feature matrix and its optional labels.

    Args:
    ----
        path (str | Path): The file to read.
        fmt (FeatureFormat): Either "binary" or "csv".
        with_labels (bool): For csv only, whether the final column holds labels.
            Binary files declare their labels in the header.

    Returns:
    -------
        tuple[FeatureMatrix, LabelVector | None]: The features, and the labels if
        the file carries them.

    Raises:
    ------
        DataError: On a malformed header, a row length mismatch or a non-finite
            value. The message names the offending row where there is one.

    """
    _check_format(fmt)
    path = Path(path)
    if fmt == "binary":
        features, labels = _load_binary(path)
    else:
        features, labels = _load_csv(path, with_labels)
    logger.info(
        "Loaded %d x %d features from %s (labels: %s)",
        features.n_samples,
        features.dim,
        path,
        labels is not None,
    )
    return features, labels


def save_features(
    path: str | Path,
    features: FeatureMatrix,
    labels: LabelVector | None = None,
    fmt: FeatureFormat = "binary",
) -> None:
    """Write features (and labels) in the given format.

    The binary format stores float32, so load_features(save_features(M)) is exact
    for matrices representable in float32. The csv format writes full repr
    precision.
    """
    _check_format(fmt)
    path = Path(path)
    if labels is not None and len(labels) != features.n_samples:
        raise DataError(
            f"{len(labels)} labels for {features.n_samples} feature rows."
        )
    if fmt == "binary":
        header = np.zeros(1, dtype=HEADER_DTYPE)
        header["magic"] = FEATURE_MAGIC
        header["n"] = features.n_samples
        header["d"] = features.dim
        header["label_flag"] = int(labels is not None)
        with path.open("wb") as fh:
            fh.write(header.tobytes())
            fh.write(features.data.astype("<f4").tobytes(order="C"))
            if labels is not None:
                fh.write(labels.labels.astype("<u4").tobytes())
    else:
        frame = pd.DataFrame(features.data)
        if labels is not None:
            frame[features.dim] = labels.labels
        frame.to_csv(path, header=False, index=False, float_format="%.17g")


def _load_binary(path: Path) -> tuple[FeatureMatrix, LabelVector | None]:
    raw = path.read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise DataError(f"{path} is too short to hold a feature header.")
    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if header["magic"] != FEATURE_MAGIC:
        raise DataError(f"{path} does not start with magic {FEATURE_MAGIC!r}.")
    n, d, flag = int(header["n"]), int(header["d"]), int(header["label_flag"])
    if flag not in (0, 1):
        raise DataError(f"{path} has invalid label flag {flag}.")
    n_values = n * d
    expected = HEADER_DTYPE.itemsize + 4 * n_values + 4 * n * flag
    if len(raw) != expected:
        raise DataError(
            f"{path} holds {len(raw)} bytes but its header (N={n}, D={d}, "
            f"labels={flag}) requires {expected}."
        )
    data = np.frombuffer(
        raw, dtype="<f4", count=n_values, offset=HEADER_DTYPE.itemsize
    ).reshape(n, d)
    features = FeatureMatrix(data.astype(np.float64))
    labels = None
    if flag:
        offset = HEADER_DTYPE.itemsize + 4 * n_values
        labels = LabelVector(
            np.frombuffer(raw, dtype="<u4", count=n, offset=offset).astype(np.int64)
        )
    return features, labels


def _load_csv(path: Path, with_labels: bool) -> tuple[FeatureMatrix, LabelVector | None]:
    try:
        frame = pd.read_csv(
            path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True
        )
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{path} holds no rows.") from e
    except pd.errors.ParserError as e:
        raise DataError(f"row length mismatch in {path}: {e}") from e

    cells = frame.to_numpy()
    n_cols = cells.shape[1]
    for row, values in enumerate(cells):
        if any(pd.isna(v) or str(v).strip() == "" for v in values):
            raise DataError(
                f"row {row} of {path} has fewer than {n_cols} values.", row=row
            )

    numeric = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    labels = None
    if with_labels:
        if n_cols < 2:
            raise DataError(f"{path} needs at least one feature column and a label column.")
        label_col = numeric[:, -1]
        numeric = numeric[:, :-1]
        bad = ~np.isfinite(label_col) | (label_col != np.round(label_col))
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DataError(f"label in row {row} of {path} is not an integer.", row=row)
        labels = LabelVector(label_col.astype(np.int64))

    bad_rows = ~np.isfinite(numeric).all(axis=1)
    if bad_rows.any():
        row = int(np.flatnonzero(bad_rows)[0])
        raise DataError(f"non-finite value in row {row} of {path}.", row=row)
    return FeatureMatrix(numeric), labels
