"""Head and backbone checkpoints.

A checkpoint file is a sequence of records. Each record starts with the magic
bytes ``LSDH`` and little-endian u32 kind, D, H and out, followed by the
parameters as little-endian float32 in serialisation order. Kind 0 is a linear
head, 1 a two-layer head and 2 a mini-backbone. A file holds an optional
backbone record followed by one head record.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from lsdc.errors import DataError
from lsdc.model._base_head import ClassifierHead, TrainableBlock
from lsdc.model.heads import LinearHead, MLPBackbone, TwoLayerHead

HEAD_MAGIC = b"LSDH"

RECORD_DTYPE = np.dtype(
    [("magic", "S4"), ("kind", "<u4"), ("d", "<u4"), ("h", "<u4"), ("out", "<u4")]
)

_KIND_CODES: dict[type[TrainableBlock], int] = {LinearHead: 0, TwoLayerHead: 1, MLPBackbone: 2}
_CODE_KINDS = {code: cls for cls, code in _KIND_CODES.items()}


def _record_bytes(block: TrainableBlock) -> bytes:
    header = np.zeros(1, dtype=RECORD_DTYPE)
    header["magic"] = HEAD_MAGIC
    header["kind"] = _KIND_CODES[type(block)]
    header["d"] = block.in_dim
    header["h"] = block.hidden_dim
    header["out"] = block.out_dim
    payload = np.concatenate([block.params[name].ravel() for name in block.param_names])
    return header.tobytes() + payload.astype("<f4").tobytes()


def save_checkpoint(
    path: str | Path, head: ClassifierHead, backbone: MLPBackbone | None = None
) -> None:
    """Write the (optional) backbone and the head to path."""
    records = [] if backbone is None else [_record_bytes(backbone)]
    records.append(_record_bytes(head))
    Path(path).write_bytes(b"".join(records))


def _shapes(code: int, d: int, h: int, out: int) -> list[tuple[str, tuple[int, ...]]]:
    if code == 0:
        return [("W", (d, out)), ("b", (out,))]
    return [("W1", (d, h)), ("b1", (h,)), ("W", (h, out)), ("b", (out,))]


def load_checkpoint(path: str | Path) -> tuple[ClassifierHead, MLPBackbone | None]:
    """Read a checkpoint written by save_checkpoint.

    Raises
    ------
        DataError: On a bad magic, an unknown kind, a truncated payload or an
            unexpected record sequence.

    """
    raw = Path(path).read_bytes()
    offset = 0
    blocks: list[TrainableBlock] = []
    while offset < len(raw):
        if len(raw) - offset < RECORD_DTYPE.itemsize:
            raise DataError(f"{path} ends inside a record header.")
        header = np.frombuffer(raw, dtype=RECORD_DTYPE, count=1, offset=offset)[0]
        if header["magic"] != HEAD_MAGIC:
            raise DataError(f"{path} record at byte {offset} lacks magic {HEAD_MAGIC!r}.")
        code = int(header["kind"])
        if code not in _CODE_KINDS:
            raise DataError(f"{path} record at byte {offset} has unknown kind {code}.")
        offset += RECORD_DTYPE.itemsize
        params = {}
        for name, shape in _shapes(code, int(header["d"]), int(header["h"]), int(header["out"])):
            count = int(np.prod(shape))
            if len(raw) - offset < 4 * count:
                raise DataError(f"{path} is truncated inside parameter {name}.")
            values = np.frombuffer(raw, dtype="<f4", count=count, offset=offset)
            params[name] = values.astype(np.float64).reshape(shape)
            offset += 4 * count
        blocks.append(_CODE_KINDS[code](params))

    if not blocks or not isinstance(blocks[-1], ClassifierHead):
        raise DataError(f"{path} does not end with a classifier head record.")
    if len(blocks) == 1:
        return blocks[0], None  # type: ignore[return-value]
    if len(blocks) == 2 and isinstance(blocks[0], MLPBackbone):
        return blocks[1], blocks[0]  # type: ignore[return-value]
    raise DataError(f"{path} holds an unexpected sequence of {len(blocks)} records.")
