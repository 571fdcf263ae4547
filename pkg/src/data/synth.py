"""
Deterministic synthetic gestures.

A template fixes a wrist trajectory (4 control points in the unit cube,
Catmull-Rom interpolated) and per-finger flexion at the start and end of the
gesture. Sampling a template poses a 21-point hand skeleton at T uniform time
points, adds Gaussian noise and normalizes every frame.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.data.dataset import GestureDataset, LandmarkSequence
from src.data.landmarks import FEATURES_PER_FRAME, FINGER_CHAINS, NUM_LANDMARKS, normalize_landmarks
from src.data.render import render_volume
from src.models.base import Modality

logger = logging.getLogger(__name__)

FINGERS = ("thumb", "index", "middle", "ring", "pinky")
MAX_FLEXION = np.pi / 2
TEMPLATE_SEED = 0
PALM_NORMAL = np.array([0.0, 0.0, -1.0])


# ---------------------------------------------------------------------------
# Skeleton
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FingerGeometry:
    base: tuple[float, float, float]
    direction: tuple[float, float, float]
    bones: tuple[float, float, float]


def _unit(x: float, y: float) -> tuple[float, float, float]:
    n = float(np.hypot(x, y))
    return (x / n, y / n, 0.0)


@dataclass(frozen=True, eq=False)
class HandSkeleton:
    """Rest pose of an open right hand in its own plane, wrist at the origin."""
    fingers: dict[str, FingerGeometry] = field(default_factory=dict)

    @classmethod
    def default(cls) -> HandSkeleton:
        return cls(
            {
                "thumb": FingerGeometry((-0.30, 0.30, 0.0), _unit(-1.0, 1.0), (0.35, 0.30, 0.25)),
                "index": FingerGeometry((-0.25, 0.95, 0.0), _unit(-0.1, 1.0), (0.45, 0.27, 0.22)),
                "middle": FingerGeometry((0.0, 1.0, 0.0), (0.0, 1.0, 0.0), (0.50, 0.30, 0.24)),
                "ring": FingerGeometry((0.22, 0.95, 0.0), _unit(0.08, 1.0), (0.46, 0.28, 0.22)),
                "pinky": FingerGeometry((0.42, 0.85, 0.0), _unit(0.2, 1.0), (0.36, 0.22, 0.20)),
            }
        )

    def pose(self, flexion: np.ndarray) -> np.ndarray:
        """
        (21, 3) landmark positions for five flexion angles.

        Each joint of a finger bends by the finger's angle toward the palm, so
        the k-th bone points along cos(k*phi) * d + sin(k*phi) * palm_normal.
        """
        points = np.zeros((NUM_LANDMARKS, 3))
        for name, phi in zip(FINGERS, flexion):
            geo = self.fingers[name]
            chain = FINGER_CHAINS[name]
            d = np.asarray(geo.direction)
            p = np.asarray(geo.base, dtype=np.float64)
            points[chain[0]] = p
            for k, (idx, length) in enumerate(zip(chain[1:], geo.bones), start=1):
                direction = np.cos(k * phi) * d + np.sin(k * phi) * PALM_NORMAL
                p = p + length * direction
                points[idx] = p
        return points


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GestureTemplate:
    class_id: int
    control_points: np.ndarray
    flex_start: np.ndarray
    flex_end: np.ndarray
    skeleton: HandSkeleton = field(default_factory=HandSkeleton.default)

    def __post_init__(self) -> None:
        cp = np.asarray(self.control_points, dtype=np.float64)
        if cp.shape != (4, 3):
            raise ValueError(f"need 4 control points in 3D, got {cp.shape}")
        if cp.min() < 0.0 or cp.max() > 1.0:
            raise ValueError("control points must lie in the unit cube")
        for label, angles in (("flex_start", self.flex_start), ("flex_end", self.flex_end)):
            arr = np.asarray(angles, dtype=np.float64)
            if arr.shape != (len(FINGERS),):
                raise ValueError(f"{label} needs {len(FINGERS)} angles, got {arr.shape}")
            if arr.min() < 0.0 or arr.max() > MAX_FLEXION:
                raise ValueError(f"{label} angles must lie in [0, pi/2]")
        if self.class_id < 0:
            raise ValueError(f"class_id must be >= 0, got {self.class_id}")

    @property
    def signature(self) -> np.ndarray:
        return np.concatenate([self.flex_start, self.flex_end])


def default_templates(
    n: int = 10,
    seed: int = TEMPLATE_SEED,
    min_separation: float = 0.6,
    max_attempts: int = 10_000,
) -> list[GestureTemplate]:
    """
    n random templates whose flexion signatures are pairwise at least
    min_separation apart (L2, radians).
    """
    if n < 1:
        raise ValueError(f"need at least one template, got {n}")
    rng = np.random.default_rng(seed)
    templates: list[GestureTemplate] = []
    attempts = 0
    while len(templates) < n:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError(f"could not place {n} templates {min_separation} apart")
        start = rng.uniform(0.0, MAX_FLEXION, len(FINGERS))
        end = rng.uniform(0.0, MAX_FLEXION, len(FINGERS))
        signature = np.concatenate([start, end])
        if any(np.linalg.norm(signature - t.signature) < min_separation for t in templates):
            continue
        templates.append(
            GestureTemplate(
                class_id=len(templates),
                control_points=rng.uniform(0.0, 1.0, (4, 3)),
                flex_start=start,
                flex_end=end,
            )
        )
    return templates


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def catmull_rom(points: np.ndarray, t: float) -> np.ndarray:
    """Point at t in [0, 1] on the spline through all control points."""
    points = np.asarray(points, dtype=np.float64)
    padded = np.vstack([points[:1], points, points[-1:]])
    segments = len(points) - 1
    s = float(np.clip(t, 0.0, 1.0)) * segments
    i = min(int(s), segments - 1)
    u = s - i
    p0, p1, p2, p3 = padded[i : i + 4]
    return 0.5 * (
        2 * p1
        + (p2 - p0) * u
        + (2 * p0 - 5 * p1 + 4 * p2 - p3) * u**2
        + (3 * p1 - p0 - 3 * p2 + p3) * u**3
    )


def child_seed(seed: int, index: int) -> int:
    """Independent per-sample seed derived from (seed, index)."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def generate_gesture(
    template: GestureTemplate,
    T: int = 30,
    noise_sigma: float = 0.01,
    seed: int = 0,
) -> LandmarkSequence:
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T}")
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")

    rng = np.random.default_rng(seed)
    frames = np.empty((T, FEATURES_PER_FRAME))
    for i in range(T):
        t = i / (T - 1)
        flex = template.flex_start + (template.flex_end - template.flex_start) * t
        raw = template.skeleton.pose(flex) + catmull_rom(template.control_points, t)
        raw = raw.reshape(FEATURES_PER_FRAME)
        if noise_sigma > 0:
            raw = raw + rng.normal(0.0, noise_sigma, FEATURES_PER_FRAME)
        frames[i] = normalize_landmarks(raw)
    return LandmarkSequence(frames, template.class_id)


def idle_frames(
    n: int,
    noise_sigma: float = 0.01,
    seed: int = 0,
    skeleton: Optional[HandSkeleton] = None,
) -> np.ndarray:
    """n normalized frames of an open hand at rest, jittered by noise."""
    skeleton = skeleton or HandSkeleton.default()
    rest = skeleton.pose(np.zeros(len(FINGERS))).reshape(FEATURES_PER_FRAME)
    rng = np.random.default_rng(seed)
    out = np.empty((n, FEATURES_PER_FRAME))
    for i in range(n):
        raw = rest + rng.normal(0.0, noise_sigma, FEATURES_PER_FRAME) if noise_sigma > 0 else rest
        out[i] = normalize_landmarks(raw)
    return out


def resample_sequence(frames: np.ndarray, length: int) -> np.ndarray:
    """Linear interpolation of a (T, F) sequence onto `length` uniform time points."""
    frames = np.asarray(frames, dtype=np.float64)
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if frames.shape[0] == 1 or length == 1:
        return np.repeat(frames[:1], length, axis=0)
    positions = np.linspace(0.0, frames.shape[0] - 1, length)
    lo = np.floor(positions).astype(int)
    hi = np.minimum(lo + 1, frames.shape[0] - 1)
    w = (positions - lo)[:, None]
    return (1.0 - w) * frames[lo] + w * frames[hi]


def generate_landmark_dataset(
    num_classes: int = 10,
    samples_per_class: int = 20,
    T: int = 30,
    noise_sigma: float = 0.01,
    seed: int = 0,
    templates: Optional[list[GestureTemplate]] = None,
) -> GestureDataset:
    """Class-major samples; sample i uses child_seed(seed, i)."""
    templates = templates or default_templates(num_classes)
    if len(templates) < num_classes:
        raise ValueError(f"{len(templates)} templates for {num_classes} classes")
    samples = []
    for c in range(num_classes):
        for j in range(samples_per_class):
            i = c * samples_per_class + j
            samples.append(generate_gesture(templates[c], T, noise_sigma, child_seed(seed, i)))
    logger.debug("generated %d landmark samples over %d classes", len(samples), num_classes)
    return GestureDataset(Modality.LANDMARKS, samples, num_classes)


# ---------------------------------------------------------------------------
# Streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScriptedStream:
    """Gestures separated by idle gaps; spans[k] is the (first, last) frame of gesture k."""
    frames: np.ndarray
    labels: tuple[int, ...]
    spans: tuple[tuple[int, int], ...]

    def window_label(self, end: int, window_len: int, rest_label: int) -> int:
        """
        Ground truth for the window ending at frame `end`: the gesture's label
        when the window holds all but at most window_len // 3 frames of exactly
        one gesture and nothing of another, else rest_label.
        """
        start = end - window_len + 1
        overlaps = [
            (label, first, last)
            for label, (first, last) in zip(self.labels, self.spans)
            if first <= end and last >= start
        ]
        if len(overlaps) != 1:
            return rest_label
        label, first, last = overlaps[0]
        covered = min(end, last) - max(start, first) + 1
        return label if covered >= (last - first + 1) - window_len // 3 else rest_label


def scripted_stream(
    labels: list[int],
    T: int = 30,
    gap: int = 10,
    noise_sigma: float = 0.01,
    seed: int = 0,
    templates: Optional[list[GestureTemplate]] = None,
) -> ScriptedStream:
    """gap idle frames, then each gesture followed by gap idle frames."""
    if gap < 0:
        raise ValueError(f"gap must be >= 0, got {gap}")
    labels = [int(c) for c in labels]
    templates = templates or default_templates(max(labels, default=0) + 1)
    parts = [idle_frames(gap, noise_sigma, child_seed(seed, 0))]
    spans = []
    cursor = gap
    for k, c in enumerate(labels):
        parts.append(generate_gesture(templates[c], T, noise_sigma, child_seed(seed, 2 * k + 1)).frames)
        spans.append((cursor, cursor + T - 1))
        parts.append(idle_frames(gap, noise_sigma, child_seed(seed, 2 * k + 2)))
        cursor += T + gap
    return ScriptedStream(np.concatenate(parts), tuple(labels), tuple(spans))


def _draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2**32))


def _shifted_gesture(
    template: GestureTemplate, T: int, shift: int, noise_sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """T frames of the gesture moved `shift` frames against idle padding (< 0: late start)."""
    gesture = generate_gesture(template, T, noise_sigma, _draw_seed(rng)).frames
    idle = idle_frames(abs(shift), noise_sigma, _draw_seed(rng))
    if shift < 0:
        return np.concatenate([idle, gesture[: T + shift]])
    return np.concatenate([gesture[shift:], idle])


def _rest_window(
    templates: list[GestureTemplate], T: int, kind: int, noise_sigma: float, rng: np.random.Generator
) -> np.ndarray:
    if kind == 0:
        return idle_frames(T, noise_sigma, _draw_seed(rng))
    if kind == 1:
        shift = int(rng.integers(T // 2, T)) * (1 if rng.random() < 0.5 else -1)
        return _shifted_gesture(templates[int(rng.integers(len(templates)))], T, shift, noise_sigma, rng)

    # tail of one gesture, an idle gap, head of the next; each side keeps >= T // 6 frames
    part = T // 6
    gap = int(rng.integers(part, min(T // 2, T - 2 * part) + 1))
    a, b = (int(i) for i in rng.integers(len(templates), size=2))
    frames = np.concatenate([
        generate_gesture(templates[a], T, noise_sigma, _draw_seed(rng)).frames,
        idle_frames(gap, noise_sigma, _draw_seed(rng)),
        generate_gesture(templates[b], T, noise_sigma, _draw_seed(rng)).frames,
    ])
    end = int(rng.integers(T + gap + part - 1, 2 * T - part))
    return frames[end - T + 1 : end + 1]


def generate_stream_dataset(
    num_classes: int = 10,
    samples_per_class: int = 20,
    rest_samples: Optional[int] = None,
    T: int = 30,
    noise_sigma: float = 0.01,
    seed: int = 0,
    templates: Optional[list[GestureTemplate]] = None,
) -> GestureDataset:
    """
    Windows as a live stream sees them, for a classifier with a rest class
    (label num_classes). Sign samples hold one gesture shifted by up to T // 3
    frames against idle padding. Rest samples cycle through idle hands,
    gestures shifted by T // 2 or more, and windows straddling two gestures.
    Labels agree with ScriptedStream.window_label.
    """
    if T < 6:
        raise ValueError(f"stream windows need T >= 6, got {T}")
    templates = templates or default_templates(num_classes)
    if len(templates) < num_classes:
        raise ValueError(f"{len(templates)} templates for {num_classes} classes")
    templates = templates[:num_classes]
    rest_samples = samples_per_class if rest_samples is None else rest_samples
    max_shift = T // 3

    samples = []
    for c in range(num_classes):
        for j in range(samples_per_class):
            rng = np.random.default_rng(child_seed(seed, c * samples_per_class + j))
            shift = int(rng.integers(-max_shift, max_shift + 1))
            samples.append(LandmarkSequence(_shifted_gesture(templates[c], T, shift, noise_sigma, rng), c))
    base = num_classes * samples_per_class
    for k in range(rest_samples):
        rng = np.random.default_rng(child_seed(seed, base + k))
        samples.append(LandmarkSequence(_rest_window(templates, T, k % 3, noise_sigma, rng), num_classes))
    logger.debug("generated %d stream windows, %d of them rest", len(samples), rest_samples)
    return GestureDataset(Modality.LANDMARKS, samples, num_classes + 1)


def render_paired(
    landmarks: GestureDataset,
    volume_dims: tuple[int, int, int, int] = (16, 32, 32, 1),
    blob_sigma_px: float = 1.5,
) -> GestureDataset:
    """Volume twin of a landmark dataset, each sequence resampled to the volume's frame count."""
    volumes = []
    for seq in landmarks:
        assert isinstance(seq, LandmarkSequence)
        resampled = LandmarkSequence(resample_sequence(seq.frames, volume_dims[0]), seq.label)
        volumes.append(render_volume(resampled, volume_dims, blob_sigma_px))
    logger.debug("rendered %d volumes at %s", len(volumes), volume_dims)
    return GestureDataset(Modality.VOLUMES, volumes, landmarks.num_classes)


def generate_paired_dataset(
    num_classes: int = 10,
    samples_per_class: int = 20,
    T: int = 30,
    volume_dims: tuple[int, int, int, int] = (16, 32, 32, 1),
    noise_sigma: float = 0.01,
    blob_sigma_px: float = 1.5,
    seed: int = 0,
) -> tuple[GestureDataset, GestureDataset]:
    """
    Landmark and volume datasets where sample i in each is the same gesture
    instance: the volume renders the landmark sequence resampled to the
    volume's frame count.
    """
    landmarks = generate_landmark_dataset(num_classes, samples_per_class, T, noise_sigma, seed)
    return landmarks, render_paired(landmarks, volume_dims, blob_sigma_px)


__all__ = [
    "FINGERS",
    "GestureTemplate",
    "HandSkeleton",
    "ScriptedStream",
    "catmull_rom",
    "child_seed",
    "default_templates",
    "generate_gesture",
    "generate_landmark_dataset",
    "generate_paired_dataset",
    "generate_stream_dataset",
    "idle_frames",
    "render_paired",
    "resample_sequence",
    "scripted_stream",
]
