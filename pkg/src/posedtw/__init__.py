"""Gesture classification from 2D pose keypoints with per-dimension DTW and 1NN."""

__version__ = "0.1.0"

from .classify import (
    REJECTED, ClassificationOutcome, GestureTemplate, PipelineParams, TemplateSet, classify,
    select_template,
)
from .dtw import Window, WarpingResult, dtw_exact, fast_dtw, multi_dim_distance
from .keypoints import PoseFrame, RawSequence, load_sequence, parse_frame_file, repair_missing
from .normalize import NormalizedSequence, normalize_frame, normalize_sequence
from .signals import PreparedSequence, prepare, select_dimensions

__all__ = [
    "REJECTED", "ClassificationOutcome", "GestureTemplate", "PipelineParams", "TemplateSet",
    "classify", "select_template", "Window", "WarpingResult", "dtw_exact", "fast_dtw",
    "multi_dim_distance", "PoseFrame", "RawSequence", "load_sequence", "parse_frame_file",
    "repair_missing", "NormalizedSequence", "normalize_frame", "normalize_sequence",
    "PreparedSequence", "prepare", "select_dimensions",
]
