"""Seeded synthetic gesture corpus built from a frontal stick figure.

Each gesture moves its own set of keypoints along a smooth parametric
trajectory; the rest of the body only carries noise. Trials differ by
coordinate noise, sequence length, onset/offset timing, global pixel
translation and scale, and an occasional single-frame neck spike of the
kind pose estimators produce.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .keypoints import (
    LANKLE, LEAR, LELBOW, LEYE, LHIP, LKNEE, LSHOULDER, LWRIST, N_KEYPOINTS, NECK,
    NOSE, RANKLE, REAR, RELBOW, REYE, RHIP, RKNEE, RSHOULDER, RWRIST, RawSequence,
)
from .normalize import normalize_sequence

# Offsets from the neck in pixels; image y grows downward and the subject's
# right side appears on the image left. Shoulder width is 80 px.
REST_POSE = np.zeros((N_KEYPOINTS, 2))
REST_POSE[NOSE] = (0, -35)
REST_POSE[REYE], REST_POSE[LEYE] = (-8, -43), (8, -43)
REST_POSE[REAR], REST_POSE[LEAR] = (-17, -38), (17, -38)
REST_POSE[RSHOULDER], REST_POSE[LSHOULDER] = (-40, 0), (40, 0)
REST_POSE[RELBOW], REST_POSE[LELBOW] = (-48, 55), (48, 55)
REST_POSE[RWRIST], REST_POSE[LWRIST] = (-52, 105), (52, 105)
REST_POSE[RHIP], REST_POSE[LHIP] = (-22, 115), (22, 115)
REST_POSE[RKNEE], REST_POSE[LKNEE] = (-24, 195), (24, 195)
REST_POSE[RANKLE], REST_POSE[LANKLE] = (-25, 270), (25, 270)

NECK_PX = (320.0, 130.0)


def _bump(u):
    return np.sin(np.pi * u) ** 2


def _right_swipe(u, off):
    b = _bump(u)
    off[RWRIST] += np.c_[150 * b, -110 * b]
    off[RELBOW] += np.c_[60 * b, -50 * b]


def _right_swipe_low(u, off):
    # same limb and sweep as the swipe, with a slightly flatter, later arc
    b = _bump(u)
    late = _bump(np.clip(1.25 * u - 0.2, 0, 1))
    off[RWRIST] += np.c_[150 * b, -85 * b - 20 * late]
    off[RELBOW] += np.c_[60 * b, -38 * b - 10 * late]


def _left_circle(u, off):
    a = 2 * np.pi * u
    off[LWRIST] += np.c_[-70 * np.sin(a), -70 * (1 - np.cos(a)) - 30 * _bump(u)]
    off[LELBOW] += np.c_[-30 * np.sin(a), -30 * (1 - np.cos(a))]


def _right_kick(u, off):
    b = _bump(u)
    off[RKNEE] += np.c_[-35 * b, -90 * b]
    off[RANKLE] += np.c_[-110 * b, -130 * b]


def _left_step(u, off):
    b = _bump(u)
    off[LKNEE] += np.c_[80 * b, -15 * b]
    off[LANKLE] += np.c_[140 * b, -25 * b]


def _head_shake(u, off):
    s = np.sin(2 * np.pi * u)
    b = _bump(u)
    for k in (NOSE, REYE, LEYE, REAR, LEAR):
        off[k] += np.c_[-80 * s, 20 * b]


def _hip_sway(u, off):
    s = np.sin(2 * np.pi * u)
    off[RHIP] += np.c_[80 * s, 10 * _bump(u)]
    off[LHIP] += np.c_[80 * s, 10 * _bump(u)]


GESTURES = {
    "r_swipe": _right_swipe,
    "l_circle": _left_circle,
    "r_kick": _right_kick,
    "l_step": _left_step,
    "head_shake": _head_shake,
    "hip_sway": _hip_sway,
    "r_swipe_low": _right_swipe_low,
}
SEPARABLE_GESTURES = ("r_swipe", "l_circle", "r_kick", "l_step", "head_shake", "hip_sway")
CONFUSABLE_GESTURE = "r_swipe_low"  # near-duplicate of r_swipe


@dataclass(frozen=True)
class GeneratorSpec:
    gestures: tuple[str, ...] = SEPARABLE_GESTURES
    n_subjects: int = 8
    n_trials: int = 4
    frame_range: tuple[int, int] = (40, 60)
    noise: float = 2.0  # additive coordinate noise, pixels (std)
    time_jitter: float = 0.25  # relative length change per trial
    translation: float = 40.0  # max global shift, pixels
    scale_range: tuple[float, float] = (0.8, 1.2)
    spike_prob: float = 0.2
    spike_px: float = 6.0
    subject_variation: float = 0.1  # relative body-size and amplitude spread

    def validate(self) -> None:
        if len(self.gestures) < 2:
            raise InvalidSpec("need at least 2 gesture classes")
        if len(set(self.gestures)) != len(self.gestures):
            raise InvalidSpec("duplicate gesture names")
        unknown = set(self.gestures) - set(GESTURES)
        if unknown:
            raise InvalidSpec(f"unknown gestures {sorted(unknown)}; choose from {sorted(GESTURES)}")
        if self.n_subjects < 1 or self.n_trials < 1:
            raise InvalidSpec("n_subjects and n_trials must be >= 1")
        lo, hi = self.frame_range
        if not 8 <= lo <= hi:
            raise InvalidSpec("frame_range must satisfy 8 <= min <= max")
        if self.noise < 0 or self.spike_px < 0 or self.translation < 0:
            raise InvalidSpec("noise, spike_px and translation must be >= 0")
        if not 0 <= self.time_jitter < 1:
            raise InvalidSpec("time_jitter must lie in [0, 1)")
        if not 0 <= self.spike_prob <= 1:
            raise InvalidSpec("spike_prob must lie in [0, 1]")
        if not 0 <= self.subject_variation < 1:
            raise InvalidSpec("subject_variation must lie in [0, 1)")
        s0, s1 = self.scale_range
        if not 0 < s0 <= s1:
            raise InvalidSpec("scale_range must satisfy 0 < min <= max")


@dataclass(frozen=True)
class RawTrial:
    raw: RawSequence
    label: str
    subject: str
    trial: int


def render_gesture(
    gesture: str, n_frames: int, onset: float = 0.15, offset: float = 0.85,
    amplitude: float = 1.0, body: float = 1.0,
) -> np.ndarray:
    """Neck-relative pixel offsets, shape (n_frames, 18, 2), without noise."""
    p = np.linspace(0.0, 1.0, n_frames)
    u = np.clip((p - onset) / (offset - onset), 0.0, 1.0)
    motion = np.zeros((N_KEYPOINTS, n_frames, 2))
    GESTURES[gesture](u, motion)
    pose = body * REST_POSE[None] + amplitude * motion.transpose(1, 0, 2)
    return pose


def generate_raw_trials(spec: GeneratorSpec, seed: int) -> list[RawTrial]:
    spec.validate()
    rng = np.random.default_rng(seed)
    sv = spec.subject_variation
    out = []
    for s in range(1, spec.n_subjects + 1):
        body = rng.uniform(1 - sv, 1 + sv)
        tempo = int(rng.integers(spec.frame_range[0], spec.frame_range[1] + 1))
        style = {g: rng.uniform(1 - sv, 1 + sv) for g in spec.gestures}
        for g in spec.gestures:
            for r in range(1, spec.n_trials + 1):
                j = spec.time_jitter
                n = max(8, int(round(tempo * rng.uniform(1 - j, 1 + j))))
                onset = 0.15 + rng.uniform(-0.4, 0.4) * j
                offset = 0.85 + rng.uniform(-0.4, 0.4) * j
                pose = render_gesture(g, n, onset, offset, style[g], body)
                scale = rng.uniform(*spec.scale_range)
                shift = np.array(NECK_PX) + rng.uniform(-spec.translation, spec.translation, 2)
                px = scale * pose + shift
                px += rng.normal(0.0, spec.noise, px.shape) if spec.noise > 0 else 0.0
                if spec.spike_px > 0 and rng.random() < spec.spike_prob:
                    px[int(rng.integers(1, n - 1)), NECK, 1] -= spec.spike_px * scale
                arr = np.concatenate([px, np.ones((n, N_KEYPOINTS, 1))], axis=2)
                seq = RawSequence.from_array(arr, f"{g}_s{s}_t{r}")
                out.append(RawTrial(seq, g, str(s), r))
    return out


def generate_synthetic_corpus(spec: GeneratorSpec | None = None, seed: int = 0):
    """Normalized, labeled corpus (see :class:`posedtw.evaluation.LabeledCorpus`)."""
    from .evaluation import CorpusEntry, LabeledCorpus

    spec = spec or GeneratorSpec()
    entries = [
        CorpusEntry(normalize_sequence(t.raw, label=t.label, fps=30.0), t.subject, t.trial)
        for t in generate_raw_trials(spec, seed)
    ]
    return LabeledCorpus(entries, list(spec.gestures))
