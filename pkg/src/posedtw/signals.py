"""Signal construction, smoothing and salient-dimension selection.

A normalized sequence becomes a 36 x T matrix, one row per keypoint
coordinate: row ``2*k`` is the x trajectory of keypoint ``k``, row ``2*k+1``
its y trajectory.

Two filters run side by side on the raw rows. The median filter removes
single-frame spikes and feeds only the variance profile that decides which
rows are salient. The Gaussian filter produces the rows that are actually
warped. Its output is centered to zero mean but never scaled to unit variance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import correlate1d

from .normalize import NormalizedSequence

N_DIMS = 36


def dim_index(keypoint: int, axis: int) -> int:
    """Row of the signal matrix holding ``axis`` (0=x, 1=y) of ``keypoint``."""
    return 2 * keypoint + axis


@dataclass(frozen=True, eq=False)
class PreparedSequence:
    smoothed: np.ndarray  # (36, T), zero-mean rows
    profile: np.ndarray  # (36,), variance of median-filtered rows
    source_id: str = ""
    label: str | None = None
    source: NormalizedSequence | None = None

    def row(self, d: int) -> np.ndarray:
        return self.smoothed[d]

    def salient(self, t_var: float) -> frozenset[int]:
        return frozenset(int(d) for d in np.flatnonzero(self.profile > t_var))

    def __len__(self) -> int:
        return self.smoothed.shape[1]


def to_signal_matrix(seq: NormalizedSequence) -> np.ndarray:
    coords = np.asarray(seq.coords)
    if len(coords) < 2:
        raise ValueError("need at least 2 frames")
    # (T, 18, 2) -> (T, 36) -> (36, T); keypoint-major, x before y
    return coords.reshape(len(coords), N_DIMS).T.copy()


def median_filter(signal, radius: int = 3) -> np.ndarray:
    """Running median over ``[t - radius, t + radius]`` along the last axis.

    The window shrinks at both ends instead of padding, so no values are
    invented near the boundaries. Even-sized boundary windows take the mean of
    the two middle values.
    """
    x = np.asarray(signal, dtype=float)
    if radius < 1:
        raise ValueError("radius must be >= 1")
    n = x.shape[-1]
    out = np.empty_like(x)
    w = 2 * radius + 1
    if n >= w:
        out[..., radius:n - radius] = np.median(sliding_window_view(x, w, axis=-1), axis=-1)
        edges = [*range(radius), *range(n - radius, n)]
    else:
        edges = range(n)
    for t in edges:
        out[..., t] = np.median(x[..., max(0, t - radius):t + radius + 1], axis=-1)
    return out


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian truncated at ceil(3*sigma), normalized to sum 1."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    r = math.ceil(3 * sigma)
    i = np.arange(-r, r + 1, dtype=float)
    w = np.exp(-0.5 * (i / sigma) ** 2)
    return w / w.sum()


def gaussian_filter(signal, sigma: float = 1.0) -> np.ndarray:
    # scipy's "reflect" is the half-sample symmetric extension (d c b a | a b c d),
    # which keeps the signal sum unchanged under a symmetric kernel.
    x = np.asarray(signal, dtype=float)
    return correlate1d(x, gaussian_kernel(sigma), axis=-1, mode="reflect")


def compute_variance_profile(m: np.ndarray, median_radius: int = 3) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    filtered = median_filter(m, median_radius)
    return filtered.var(axis=1)


def prepare(
    seq: NormalizedSequence, median_radius: int = 3, sigma: float = 1.0,
) -> PreparedSequence:
    raw = to_signal_matrix(seq)
    profile = compute_variance_profile(raw, median_radius)
    smoothed = gaussian_filter(raw, sigma)
    smoothed -= smoothed.mean(axis=1, keepdims=True)
    smoothed.setflags(write=False)
    profile.setflags(write=False)
    return PreparedSequence(smoothed, profile, seq.source_id, seq.label, seq)


def select_dimensions(
    query: PreparedSequence, template: PreparedSequence, t_var: float,
) -> frozenset[int]:
    """Rows salient in either sequence (strictly above ``t_var``).

    Taking the union matters: a one-handed query compared against a two-handed
    template must still be penalised for the hand it does not move.
    """
    return query.salient(t_var) | template.salient(t_var)
