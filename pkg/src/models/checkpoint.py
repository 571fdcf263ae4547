"""
Model checkpoints.

Binary layout (all integers little-endian):

    b"GSNC" | u32 version=1 | u32 descriptor length | UTF-8 JSON descriptor
    then, per tensor in descriptor order:
    u16 name length | name | u8 rank | u32 dims[rank] | float64 data

The descriptor carries the family tag, the architecture config and the
ordered tensor names (parameters first, then non-trainable buffers), so a
checkpoint rebuilds its model without outside context.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from src.core.errors import CheckpointFormatError
from src.core.fileio import atomic_write_bytes
from src.models.base import FAMILY_MODALITY, GestureModel, Modality, ModelFamily

logger = logging.getLogger(__name__)

MAGIC = b"GSNC"
VERSION = 1


@dataclass
class ModelCheckpoint:
    family: ModelFamily
    config: dict[str, Any]
    params: dict[str, np.ndarray] = field(default_factory=dict)
    buffers: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def modality(self) -> Modality:
        return FAMILY_MODALITY[self.family]

    @property
    def param_count(self) -> int:
        return sum(int(p.size) for p in self.params.values())

    # -- model conversion -------------------------------------------------

    @classmethod
    def from_model(cls, model: GestureModel) -> ModelCheckpoint:
        return cls(
            family=model.family,
            config=model.config_dict(),
            params={name: p.data.copy() for name, p in model.params.items()},
            buffers={name: b.copy() for name, b in model.buffers().items()},
        )

    def to_model(self) -> GestureModel:
        """Rebuild the model and load tensors; the checkpoint is not shared."""
        from src.models import build_model

        try:
            model = build_model(self.family, dict(self.config))
        except Exception as exc:
            raise CheckpointFormatError(f"cannot rebuild {self.family.value} model: {exc}") from exc

        if list(model.params) != list(self.params):
            raise CheckpointFormatError(
                f"parameter names {list(self.params)} do not match architecture {list(model.params)}"
            )
        for name, tensor in model.params.items():
            value = self.params[name]
            if value.shape != tensor.shape:
                raise CheckpointFormatError(f"{name}: shape {value.shape} != {tensor.shape}")
            tensor.data = value.astype(np.float64, copy=True)
        try:
            model.load_buffers({k: v.copy() for k, v in self.buffers.items()})
        except KeyError as exc:
            raise CheckpointFormatError(str(exc)) from exc
        return model

    # -- bytes --------------------------------------------------------------

    def descriptor(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "config": self.config,
            "params": list(self.params),
            "buffers": list(self.buffers),
        }

    def to_bytes(self) -> bytes:
        desc = json.dumps(self.descriptor(), sort_keys=True, separators=(",", ":")).encode("utf-8")
        chunks = [MAGIC, np.array([VERSION, len(desc)], dtype="<u4").tobytes(), desc]
        for name, value in [*self.params.items(), *self.buffers.items()]:
            encoded = name.encode("utf-8")
            arr = np.ascontiguousarray(value, dtype="<f8")
            chunks.append(np.array([len(encoded)], dtype="<u2").tobytes())
            chunks.append(encoded)
            chunks.append(np.array([arr.ndim], dtype="u1").tobytes())
            chunks.append(np.array(arr.shape, dtype="<u4").tobytes())
            chunks.append(arr.tobytes())
        return b"".join(chunks)

    @classmethod
    def from_bytes(cls, buf: bytes) -> ModelCheckpoint:
        reader = _Reader(buf)
        if reader.take(4) != MAGIC:
            raise CheckpointFormatError("not a checkpoint (bad magic)")
        version = reader.uint("<u4")
        if version != VERSION:
            raise CheckpointFormatError(f"unsupported checkpoint version {version}")
        desc_len = reader.uint("<u4")
        try:
            desc = json.loads(reader.take(desc_len).decode("utf-8"))
            family = ModelFamily(desc["family"])
            config = dict(desc["config"])
            param_names = list(desc["params"])
            buffer_names = list(desc["buffers"])
        except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CheckpointFormatError(f"invalid descriptor: {exc}") from exc

        tensors: dict[str, np.ndarray] = {}
        for expected in [*param_names, *buffer_names]:
            name = reader.take(reader.uint("<u2")).decode("utf-8", errors="replace")
            if name != expected:
                raise CheckpointFormatError(f"tensor {name!r} where {expected!r} was expected")
            rank = reader.uint("u1")
            dims = [reader.uint("<u4") for _ in range(rank)]
            count = int(np.prod(dims)) if dims else 1
            data = np.frombuffer(reader.take(8 * count), dtype="<f8").reshape(dims)
            tensors[name] = data.astype(np.float64)
        if reader.remaining:
            raise CheckpointFormatError(f"{reader.remaining} trailing bytes")

        return cls(
            family=family,
            config=config,
            params={n: tensors[n] for n in param_names},
            buffers={n: tensors[n] for n in buffer_names},
        )

    # -- files --------------------------------------------------------------

    def save(self, path: Path | str) -> Path:
        out = atomic_write_bytes(path, self.to_bytes())
        logger.info("saved %s checkpoint (%d params) to %s", self.family.value, self.param_count, out)
        return out

    @classmethod
    def load(cls, path: Path | str) -> ModelCheckpoint:
        path = Path(path)
        try:
            buf = path.read_bytes()
        except FileNotFoundError as exc:
            raise CheckpointFormatError(f"checkpoint not found: {path}") from exc
        try:
            return cls.from_bytes(buf)
        except CheckpointFormatError as exc:
            raise CheckpointFormatError(f"{path}: {exc}") from exc


class _Reader:
    """Bounds-checked cursor over a byte buffer."""

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self.buf) - self.pos

    def take(self, n: int) -> bytes:
        if n > self.remaining:
            raise CheckpointFormatError(
                f"truncated at offset {self.pos}: need {n} bytes, have {self.remaining}"
            )
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def uint(self, dtype: str) -> int:
        dt = np.dtype(dtype)
        return int(np.frombuffer(self.take(dt.itemsize), dtype=dt)[0])


def as_model(source: GestureModel | ModelCheckpoint) -> GestureModel:
    """Model from either a live model or a checkpoint (rebuilt, so never mutated)."""
    if isinstance(source, ModelCheckpoint):
        return source.to_model()
    return source
