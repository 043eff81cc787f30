"""Reading OpenPose COCO-18 keypoint output.

OpenPose writes one JSON document per video frame (``--write_json``). Each
document holds a ``people`` list; every person carries a flat
``pose_keypoints_2d`` array of 18 (x, y, confidence) triples. Undetected body
parts are emitted as ``(0, 0, 0)``.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    KeypointNeverSeen,
    MalformedJson,
    NoPersonDetected,
    SchemaViolation,
    TooShort,
)

logger = logging.getLogger(__name__)

COCO_PARTS = (
    "Nose", "Neck", "RShoulder", "RElbow", "RWrist", "LShoulder", "LElbow",
    "LWrist", "RHip", "RKnee", "RAnkle", "LHip", "LKnee", "LAnkle", "REye",
    "LEye", "REar", "LEar",
)
N_KEYPOINTS = 18
NOSE, NECK, RSHOULDER, RELBOW, RWRIST, LSHOULDER, LELBOW, LWRIST = range(8)
RHIP, RKNEE, RANKLE, LHIP, LKNEE, LANKLE, REYE, LEYE, REAR, LEAR = range(8, 18)


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    confidence: float

    @property
    def missing(self) -> bool:
        return self.confidence == 0.0


@dataclass(frozen=True)
class PoseFrame:
    keypoints: tuple[Keypoint, ...]
    frame_index: int = 0

    def __post_init__(self):
        if len(self.keypoints) != N_KEYPOINTS:
            raise SchemaViolation(
                f"expected {N_KEYPOINTS} keypoints, got {len(self.keypoints)}"
            )

    def to_array(self) -> np.ndarray:
        """(18, 3) array of x, y, confidence."""
        return np.array([(k.x, k.y, k.confidence) for k in self.keypoints], dtype=float)

    @classmethod
    def from_array(cls, arr, frame_index: int = 0) -> "PoseFrame":
        arr = np.asarray(arr, dtype=float).reshape(N_KEYPOINTS, 3)
        kps = tuple(Keypoint(float(x), float(y), float(c)) for x, y, c in arr)
        return cls(kps, frame_index)


@dataclass(frozen=True)
class RawSequence:
    frames: tuple[PoseFrame, ...]
    source_id: str = ""

    def __post_init__(self):
        if len(self.frames) < 2:
            raise TooShort(
                f"sequence {self.source_id!r} has {len(self.frames)} frame(s); need at least 2"
            )
        for t, frame in enumerate(self.frames):
            if frame.frame_index != t:
                raise SchemaViolation(
                    f"frame_index {frame.frame_index} at position {t}; indices must run 0..T-1"
                )

    def __len__(self) -> int:
        return len(self.frames)

    def to_array(self) -> np.ndarray:
        """(T, 18, 3) array of x, y, confidence."""
        return np.stack([f.to_array() for f in self.frames])

    @classmethod
    def from_array(cls, arr, source_id: str = "") -> "RawSequence":
        arr = np.asarray(arr, dtype=float)
        frames = tuple(PoseFrame.from_array(a, t) for t, a in enumerate(arr))
        return cls(frames, source_id)


def _check_number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(f"{what} is not numeric: {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaViolation(f"{what} is not finite: {value!r}")
    return value


def parse_frame_file(data: bytes | str, frame_index: int = 0) -> PoseFrame:
    """Parse one OpenPose per-frame JSON document into a PoseFrame.

    Only the first person entry is used; extra people are ignored with a
    warning.
    """
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("people"), list):
        raise SchemaViolation("top-level object with a 'people' array expected")
    people = doc["people"]
    if not people:
        raise NoPersonDetected("no person detected in frame")
    if len(people) > 1:
        logger.warning("%d people detected; using the first entry", len(people))
    person = people[0]
    if not isinstance(person, dict) or "pose_keypoints_2d" not in person:
        raise SchemaViolation("person entry lacks 'pose_keypoints_2d'")
    flat = person["pose_keypoints_2d"]
    if not isinstance(flat, list) or len(flat) != 3 * N_KEYPOINTS:
        n = len(flat) if isinstance(flat, list) else "non-list"
        raise SchemaViolation(
            f"pose_keypoints_2d must hold {3 * N_KEYPOINTS} numbers (COCO-18), got {n}"
        )
    kps = []
    for k in range(N_KEYPOINTS):
        x, y, c = (_check_number(v, f"keypoint {k}") for v in flat[3 * k:3 * k + 3])
        if not 0.0 <= c <= 1.0:
            raise SchemaViolation(f"keypoint {k} confidence {c} outside [0, 1]")
        if x < 0 or y < 0:
            raise SchemaViolation(f"keypoint {k} has negative image coordinates ({x}, {y})")
        kps.append(Keypoint(x, y, c))
    return PoseFrame(tuple(kps), frame_index)


def serialize_frame(frame: PoseFrame) -> str:
    """Inverse of :func:`parse_frame_file` (single-person document)."""
    flat = []
    for k in frame.keypoints:
        flat.extend((k.x, k.y, k.confidence))
    return json.dumps({"version": 1.3, "people": [{"pose_keypoints_2d": flat}]})


def load_sequence(directory: str | Path) -> RawSequence:
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.suffix == ".json" and p.is_file())
    if len(files) < 2:
        raise TooShort(f"{directory}: {len(files)} frame file(s); need at least 2")
    frames = []
    for t, path in enumerate(files):
        try:
            frames.append(parse_frame_file(path.read_bytes(), t))
        except (MalformedJson, SchemaViolation, NoPersonDetected) as exc:
            raise type(exc)(f"{path.name}: {exc}") from exc
    return RawSequence(tuple(frames), directory.name)


def repair_missing(seq: RawSequence) -> RawSequence:
    """Fill missing keypoints by linear interpolation over time.

    Gaps at the start or end take the nearest present value. Repaired points
    keep confidence 0 so their provenance stays visible.
    """
    arr = seq.to_array()
    present = arr[:, :, 2] > 0
    if present.all():
        return seq
    t = np.arange(len(arr))
    for k in range(N_KEYPOINTS):
        mask = present[:, k]
        if not mask.any():
            raise KeypointNeverSeen(k)
        if mask.all():
            continue
        for axis in (0, 1):
            arr[~mask, k, axis] = np.interp(t[~mask], t[mask], arr[mask, k, axis])
    return RawSequence.from_array(arr, seq.source_id)
