"""Translation and scale normalization of pose keypoints.

Each frame is shifted so the neck sits at the origin and divided by that
frame's shoulder-to-shoulder distance. Rotation is deliberately left alone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShoulders
from .keypoints import LSHOULDER, N_KEYPOINTS, NECK, RSHOULDER, PoseFrame, RawSequence

SHOULDER_EPS = 1e-6  # pixels


@dataclass(frozen=True)
class NormalizedFrame:
    coords: np.ndarray  # (18, 2), shoulder-width units


@dataclass(frozen=True, eq=False)
class NormalizedSequence:
    coords: np.ndarray  # (T, 18, 2)
    source_id: str = ""
    label: str | None = None
    fps: float | None = None

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 3 or coords.shape[1:] != (N_KEYPOINTS, 2):
            raise ValueError(f"coords must have shape (T, 18, 2), got {coords.shape}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def frames(self) -> list[NormalizedFrame]:
        return [NormalizedFrame(c) for c in self.coords]

    def with_label(self, label: str | None) -> "NormalizedSequence":
        return NormalizedSequence(self.coords, self.source_id, label, self.fps)


def _normalize_xy(xy: np.ndarray, eps: float) -> np.ndarray:
    """Normalize an (..., 18, 2) array frame by frame."""
    neck = xy[..., NECK:NECK + 1, :]
    width = np.linalg.norm(xy[..., LSHOULDER, :] - xy[..., RSHOULDER, :], axis=-1)
    bad = np.flatnonzero(np.atleast_1d(width) <= eps)
    if bad.size:
        t = int(bad[0])
        raise DegenerateShoulders(float(np.atleast_1d(width)[t]), t if xy.ndim == 3 else None)
    out = (xy - neck) / width[..., None, None]
    # exact zero even when the subtraction above leaves -0.0
    out[..., NECK, :] = 0.0
    return out


def normalize_frame(frame: PoseFrame, eps: float = SHOULDER_EPS) -> NormalizedFrame:
    return NormalizedFrame(_normalize_xy(frame.to_array()[:, :2], eps))


def normalize_sequence(
    seq: RawSequence, label: str | None = None, fps: float | None = None,
    eps: float = SHOULDER_EPS,
) -> NormalizedSequence:
    """Normalize every frame independently (per-frame shoulder scale)."""
    return NormalizedSequence(_normalize_xy(seq.to_array()[:, :, :2], eps), seq.source_id, label, fps)


def normalize_array(raw: np.ndarray, eps: float = SHOULDER_EPS) -> np.ndarray:
    """Normalize a (T, 18, 2) or (T, 18, 3) pixel array without building frames."""
    return _normalize_xy(np.asarray(raw, dtype=float)[..., :2], eps)
