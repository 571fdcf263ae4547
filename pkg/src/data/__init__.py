"""
Gesture data: landmark normalization, synthetic generation, rendering,
windowing and dataset files.
"""

from src.data.dataset import FrameVolume, GestureDataset, LandmarkSequence, Sample, split_dataset
from src.data.formats import (
    LANDMARKS_FILE,
    VOLUMES_DIR,
    decode_gvol,
    encode_gvol,
    read_dataset,
    read_for_modality,
    read_landmark_dataset,
    read_volume_dataset,
    write_landmark_dataset,
    write_paired_dataset,
    write_volume_dataset,
)
from src.data.landmarks import FEATURES_PER_FRAME, NUM_LANDMARKS, is_normalized, normalize_landmarks
from src.data.render import ViewBox, render_points, render_volume
from src.data.synth import (
    GestureTemplate,
    HandSkeleton,
    ScriptedStream,
    default_templates,
    generate_gesture,
    generate_landmark_dataset,
    generate_paired_dataset,
    generate_stream_dataset,
    idle_frames,
    render_paired,
    resample_sequence,
    scripted_stream,
)
from src.data.windows import window_count, window_stream

__all__ = [
    "FEATURES_PER_FRAME",
    "LANDMARKS_FILE",
    "NUM_LANDMARKS",
    "VOLUMES_DIR",
    "FrameVolume",
    "GestureDataset",
    "GestureTemplate",
    "HandSkeleton",
    "LandmarkSequence",
    "Sample",
    "ScriptedStream",
    "ViewBox",
    "decode_gvol",
    "default_templates",
    "encode_gvol",
    "generate_gesture",
    "generate_landmark_dataset",
    "generate_paired_dataset",
    "generate_stream_dataset",
    "idle_frames",
    "is_normalized",
    "normalize_landmarks",
    "read_dataset",
    "read_for_modality",
    "read_landmark_dataset",
    "read_volume_dataset",
    "render_paired",
    "render_points",
    "render_volume",
    "resample_sequence",
    "scripted_stream",
    "split_dataset",
    "window_count",
    "window_stream",
    "write_landmark_dataset",
    "write_paired_dataset",
    "write_volume_dataset",
]
