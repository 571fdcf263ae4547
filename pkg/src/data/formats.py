"""
Dataset files.

- Landmarks: JSON lines, one `{"label": int, "frames": [[63 floats], ...]}` per
  sample. Python's float repr round-trips float64 exactly.
- Volumes: a directory with `manifest.json` plus one `.gvol` file per sample.
  A `.gvol` is b"GVOL", u32 version 1, four u32 dims (T, H, W, C), then
  little-endian float32 voxels in row-major order.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from src.core.errors import DatasetFormatError, GestureBenchError, ModalityMismatchError
from src.core.fileio import atomic_write_bytes, atomic_write_text
from src.data.dataset import FrameVolume, GestureDataset, LandmarkSequence
from src.data.landmarks import FEATURES_PER_FRAME
from src.models.base import Modality

logger = logging.getLogger(__name__)

GVOL_MAGIC = b"GVOL"
GVOL_VERSION = 1
GVOL_HEADER_BYTES = 4 + 4 + 16
MANIFEST_NAME = "manifest.json"


# ---------------------------------------------------------------------------
# Landmark JSONL
# ---------------------------------------------------------------------------

def write_landmark_dataset(path: Path | str, dataset: GestureDataset) -> Path:
    if dataset.modality is not Modality.LANDMARKS:
        raise ValueError("write_landmark_dataset needs a landmark dataset")
    lines = []
    for sample in dataset:
        assert isinstance(sample, LandmarkSequence)
        lines.append(json.dumps({"label": int(sample.label), "frames": sample.frames.tolist()}))
    out = atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))
    logger.info("wrote %d landmark samples to %s", len(lines), out)
    return out


def _parse_landmark_record(record: Any, path: Path, line: int) -> LandmarkSequence:
    if not isinstance(record, dict) or "label" not in record or "frames" not in record:
        raise DatasetFormatError("record needs 'label' and 'frames'", path=path, line=line)
    label = record["label"]
    if not isinstance(label, int) or isinstance(label, bool) or label < 0:
        raise DatasetFormatError(f"label must be a non-negative int, got {label!r}", path=path, line=line)
    frames = record["frames"]
    if not isinstance(frames, list) or not frames:
        raise DatasetFormatError("frames must be a non-empty list", path=path, line=line)
    for i, frame in enumerate(frames):
        if not isinstance(frame, list) or len(frame) != FEATURES_PER_FRAME:
            raise DatasetFormatError(
                f"frame {i} must hold {FEATURES_PER_FRAME} numbers", path=path, line=line
            )
    try:
        arr = np.array(frames, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DatasetFormatError(f"non-numeric frame value: {exc}", path=path, line=line) from exc
    if not np.all(np.isfinite(arr)):
        raise DatasetFormatError("frames contain non-finite values", path=path, line=line)
    return LandmarkSequence(arr, label)


def read_landmark_dataset(path: Path | str, num_classes: int = 0) -> GestureDataset:
    path = Path(path)
    if not path.is_file():
        raise DatasetFormatError("landmark dataset not found", path=path)
    samples = []
    with open(path, encoding="utf-8") as f:
        for line_no, text in enumerate(f, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(
                    f"invalid JSON: {exc.msg}", path=path, line=line_no, offset=exc.colno
                ) from exc
            samples.append(_parse_landmark_record(record, path, line_no))
    if num_classes and samples and max(s.label for s in samples) >= num_classes:
        raise DatasetFormatError(f"label out of range for {num_classes} classes", path=path)
    logger.debug("read %d landmark samples from %s", len(samples), path)
    return GestureDataset(Modality.LANDMARKS, samples, num_classes)


# ---------------------------------------------------------------------------
# Volume .gvol + manifest
# ---------------------------------------------------------------------------

def encode_gvol(voxels: np.ndarray) -> bytes:
    voxels = np.asarray(voxels)
    if voxels.ndim != 4:
        raise ValueError(f"gvol needs a (T, H, W, C) array, got {voxels.shape}")
    header = GVOL_MAGIC + np.array([GVOL_VERSION, *voxels.shape], dtype="<u4").tobytes()
    return header + np.ascontiguousarray(voxels, dtype="<f4").tobytes()


def decode_gvol(buf: bytes, path: Path | str | None = None) -> np.ndarray:
    """Parse a .gvol buffer into a float64 (T, H, W, C) array."""
    if len(buf) < GVOL_HEADER_BYTES:
        raise DatasetFormatError("truncated header", path=path, offset=len(buf))
    if buf[:4] != GVOL_MAGIC:
        raise DatasetFormatError(f"bad magic {buf[:4]!r}", path=path, offset=0)
    version, *dims = np.frombuffer(buf, dtype="<u4", count=5, offset=4).tolist()
    if version != GVOL_VERSION:
        raise DatasetFormatError(f"unsupported version {version}", path=path, offset=4)
    if any(d < 1 for d in dims):
        raise DatasetFormatError(f"non-positive dims {dims}", path=path, offset=8)
    expected = GVOL_HEADER_BYTES + 4 * int(np.prod(dims))
    if len(buf) != expected:
        what = "truncated" if len(buf) < expected else "trailing bytes in"
        raise DatasetFormatError(
            f"{what} voxel data: {len(buf)} bytes, expected {expected}",
            path=path,
            offset=min(len(buf), expected),
        )
    data = np.frombuffer(buf, dtype="<f4", offset=GVOL_HEADER_BYTES).reshape(dims)
    return data.astype(np.float64)


def write_volume_dataset(directory: Path | str, dataset: GestureDataset) -> Path:
    if dataset.modality is not Modality.VOLUMES:
        raise ValueError("write_volume_dataset needs a volume dataset")
    if not len(dataset):
        raise ValueError("cannot write an empty volume dataset")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    dims = dataset[0].array.shape
    entries = []
    for i, sample in enumerate(dataset):
        assert isinstance(sample, FrameVolume)
        if sample.dims != dims:
            raise ValueError(f"sample {i} dims {sample.dims} differ from {dims}")
        name = f"sample_{i:05d}.gvol"
        atomic_write_bytes(directory / name, encode_gvol(sample.voxels))
        entries.append({"label": int(sample.label), "file": name})

    manifest = {"dims": list(dims), "classes": dataset.num_classes, "samples": entries}
    out = atomic_write_text(directory / MANIFEST_NAME, json.dumps(manifest, indent=2))
    logger.info("wrote %d volume samples to %s", len(entries), directory)
    return out


def read_volume_dataset(directory: Path | str) -> GestureDataset:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME if directory.is_dir() else directory
    directory = manifest_path.parent
    if not manifest_path.is_file():
        raise DatasetFormatError("manifest not found", path=manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(
            f"invalid JSON: {exc.msg}", path=manifest_path, line=exc.lineno, offset=exc.colno
        ) from exc
    try:
        dims = tuple(int(d) for d in manifest["dims"])
        classes = int(manifest["classes"])
        entries = list(manifest["samples"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"manifest missing or invalid field: {exc}", path=manifest_path) from exc

    samples = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or not isinstance(entry.get("file"), str):
            raise DatasetFormatError(f"sample entry {i} needs a \"file\" name", path=manifest_path)
        if isinstance(entry.get("label"), bool) or not isinstance(entry.get("label"), int):
            raise DatasetFormatError(f"sample entry {i} needs an integer \"label\"", path=manifest_path)
        sample_path = directory / entry["file"]
        if not sample_path.is_file():
            raise DatasetFormatError(f"missing sample file {entry['file']!r}", path=manifest_path)
        voxels = decode_gvol(sample_path.read_bytes(), sample_path)
        if voxels.shape != dims:
            raise DatasetFormatError(
                f"dims {voxels.shape} do not match manifest {dims}", path=sample_path
            )
        try:
            samples.append(FrameVolume(voxels, entry["label"]))
        except (GestureBenchError, ValueError) as exc:
            raise DatasetFormatError(str(exc), path=sample_path) from exc
    logger.debug("read %d volume samples from %s", len(samples), directory)
    return GestureDataset(Modality.VOLUMES, samples, classes)


def read_dataset(path: Path | str) -> GestureDataset:
    """Landmark JSONL file or volume directory/manifest, picked by what path is."""
    path = Path(path)
    if path.is_dir() or path.name == MANIFEST_NAME:
        return read_volume_dataset(path)
    return read_landmark_dataset(path)


# ---------------------------------------------------------------------------
# Paired dataset directories (landmarks.jsonl + volumes/)
# ---------------------------------------------------------------------------

LANDMARKS_FILE = "landmarks.jsonl"
VOLUMES_DIR = "volumes"


def write_paired_dataset(
    root: Path | str,
    landmarks: GestureDataset,
    volumes: GestureDataset | None = None,
) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    write_landmark_dataset(root / LANDMARKS_FILE, landmarks)
    if volumes is not None:
        write_volume_dataset(root / VOLUMES_DIR, volumes)
    return root


def read_for_modality(path: Path | str, modality: Modality) -> GestureDataset:
    """
    Read the dataset a model of `modality` consumes.

    `path` may be a paired root directory, a landmark JSONL file or a volume
    directory/manifest; the latter two must hold the requested modality.
    """
    path = Path(path)
    if path.is_dir() and ((path / LANDMARKS_FILE).is_file() or (path / VOLUMES_DIR).is_dir()):
        if modality is Modality.LANDMARKS:
            return read_landmark_dataset(path / LANDMARKS_FILE)
        return read_volume_dataset(path / VOLUMES_DIR)
    dataset = read_dataset(path)
    if dataset.modality is not modality:
        raise ModalityMismatchError(
            f"{path} holds {dataset.modality.value}, model needs {modality.value}"
        )
    return dataset
