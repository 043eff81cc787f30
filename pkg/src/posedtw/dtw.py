"""Dynamic time warping: the exact dynamic program and the FastDTW approximation.

Both use the absolute difference as local cost and the symmetric, unweighted
step pattern {(1, 0), (0, 1), (1, 1)}. Distances are the plain sum of local
costs along the path, with no normalization by path length.

FastDTW (Salvador & Chan) halves both series, solves the coarse problem
recursively, projects the coarse path back to full resolution and runs the
dynamic program only inside that projection widened by ``radius`` cells.

The DP kernels work on Python floats rather than numpy scalars; for the short
series used here that is several times faster than element-wise numpy access.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import inf
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySeries, NoDimensionsSelected

Path = list[tuple[int, int]]


def _as_list(x) -> list[float]:
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySeries("DTW needs non-empty series")
    return arr.tolist()


@dataclass(frozen=True)
class Window:
    """Per-row inclusive column ranges ``[lo_i, hi_i]`` of the search region."""

    ranges: tuple[tuple[int, int], ...]
    n_cols: int

    @classmethod
    def full(cls, n: int, m: int) -> "Window":
        return cls(tuple((0, m - 1) for _ in range(n)), m)

    @classmethod
    def from_coarse_path(cls, path: Path, n: int, m: int, radius: int) -> "Window":
        """Project a path found on the half-resolution grid to an ``n x m`` grid.

        Every coarse cell covers its 2x2 fine block; the result is then grown
        by ``radius`` cells in every direction.
        """
        lo = [m] * n
        hi = [-1] * n
        for ci, cj in path:
            c0 = 2 * cj
            c1 = min(c0 + 1, m - 1)
            for i in (2 * ci, 2 * ci + 1):
                if i < n:
                    if c0 < lo[i]:
                        lo[i] = c0
                    if c1 > hi[i]:
                        hi[i] = c1
        # lo and hi are non-decreasing, so the square neighbourhood of row i
        # reaches furthest left at row i - radius and furthest right at i + radius.
        ranges = tuple(
            (max(0, lo[max(0, i - radius)] - radius), min(m - 1, hi[min(n - 1, i + radius)] + radius))
            for i in range(n)
        )
        return cls(ranges, m)

    def __len__(self) -> int:
        return len(self.ranges)

    @property
    def n_cells(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def __contains__(self, cell) -> bool:
        i, j = cell
        if not 0 <= i < len(self.ranges):
            return False
        lo, hi = self.ranges[i]
        return lo <= j <= hi


@dataclass(frozen=True)
class WarpingResult:
    per_dimension: dict[int, float]
    aggregate: float
    dimensions_used: frozenset[int] = field(default_factory=frozenset)


# Predecessors within this relative margin of the best count as tied, so that
# rounding noise in the input cannot flip the path (and with it the FastDTW
# window at the next finer level).
TIE_RTOL = 1e-9


def _backtrack(cost_at, n: int, m: int) -> Path:
    """Walk back from the last cell; ties prefer the diagonal, then up, then left."""
    i, j = n - 1, m - 1
    path = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag = cost_at(i - 1, j - 1)
            up = cost_at(i - 1, j)
            left = cost_at(i, j - 1)
            cut = min(diag, up, left)
            cut += TIE_RTOL * abs(cut) + 1e-300
            if diag <= cut:
                i, j = i - 1, j - 1
            elif up <= cut:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return path


def _dtw_full(a: list[float], b: list[float]) -> tuple[float, Path]:
    n, m = len(a), len(b)
    D = [[0.0] * m for _ in range(n)]
    row = D[0]
    acc = 0.0
    for j in range(m):
        acc = abs(a[0] - b[j]) + acc
        row[j] = acc
    for i in range(1, n):
        ai = a[i]
        prev = D[i - 1]
        row = D[i]
        left = abs(ai - b[0]) + prev[0]
        row[0] = left
        for j in range(1, m):
            diag = prev[j - 1]
            up = prev[j]
            best = diag if diag < up else up
            if left < best:
                best = left
            left = abs(ai - b[j]) + best
            row[j] = left
    path = _backtrack(lambda i, j: D[i][j], n, m)
    return D[n - 1][m - 1], path


def dtw_exact(a, b) -> tuple[float, Path]:
    """Exact DTW distance and an optimal warping path."""
    return _dtw_full(_as_list(a), _as_list(b))


def _dtw_windowed(a: list[float], b: list[float], window: Window) -> tuple[float, Path]:
    n = len(a)
    ranges = window.ranges
    D: list[list[float]] = []
    plo, phi = 0, -1
    prev: list[float] = []
    for i in range(n):
        lo, hi = ranges[i]
        ai = a[i]
        row = [0.0] * (hi - lo + 1)
        left = inf
        for j in range(lo, hi + 1):
            diag = prev[j - 1 - plo] if plo <= j - 1 <= phi else inf
            up = prev[j - plo] if plo <= j <= phi else inf
            best = diag if diag < up else up
            if left < best:
                best = left
            if i == 0 and j == 0:
                best = 0.0
            left = abs(ai - b[j]) + best
            row[j - lo] = left
        D.append(row)
        prev, plo, phi = row, lo, hi

    def cost_at(i: int, j: int) -> float:
        lo, hi = ranges[i]
        return D[i][j - lo] if lo <= j <= hi else inf

    path = _backtrack(cost_at, n, len(b))
    return cost_at(n - 1, len(b) - 1), path


def dtw_windowed(a, b, window: Window) -> tuple[float, Path]:
    """DTW restricted to ``window``; cells outside it are unreachable."""
    a, b = _as_list(a), _as_list(b)
    if len(window) != len(a) or window.n_cols != len(b):
        raise ValueError("window shape does not match the series")
    return _dtw_windowed(a, b, window)


def _coarsen(x: list[float]) -> list[float]:
    out = [(x[k] + x[k + 1]) / 2 for k in range(0, len(x) - 1, 2)]
    if len(x) % 2:
        out.append(x[-1])
    return out


def _fast_dtw(a: list[float], b: list[float], radius: int) -> tuple[float, Path]:
    if min(len(a), len(b)) <= radius + 2:
        return _dtw_full(a, b)
    _, coarse_path = _fast_dtw(_coarsen(a), _coarsen(b), radius)
    window = Window.from_coarse_path(coarse_path, len(a), len(b), radius)
    return _dtw_windowed(a, b, window)


def fast_dtw(a, b, radius: int = 1) -> tuple[float, Path]:
    """Approximate DTW in roughly linear time and space.

    The result is never below the exact distance; it equals it whenever the
    projected window covers the optimal path (always when ``radius`` is at
    least the longer series length).
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return _fast_dtw(_as_list(a), _as_list(b), int(radius))


def path_cost(a, b, path: Sequence[tuple[int, int]]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(sum(abs(a[i] - b[j]) for i, j in path))


def is_valid_path(path: Sequence[tuple[int, int]], n: int, m: int) -> bool:
    if not path or tuple(path[0]) != (0, 0) or tuple(path[-1]) != (n - 1, m - 1):
        return False
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1), (1, 1)):
            return False
    return True


def warp_distance(a, b, radius: int = 1, method: str = "fast") -> float:
    if method == "fast":
        return fast_dtw(a, b, radius)[0]
    if method == "exact":
        return dtw_exact(a, b)[0]
    raise ValueError(f"unknown DTW method {method!r}")


AGGREGATES = ("sum", "mean", "max")


def multi_dim_distance(
    q, t, dims: Iterable[int], radius: int = 1, method: str = "fast",
    aggregate: str = "sum",
) -> WarpingResult:
    """Warp each selected row independently and reduce the distances.

    ``q`` and ``t`` are prepared sequences (anything with a ``row(d)``
    method). Rows are summed in ascending index order so the aggregate is
    reproducible bit for bit. ``aggregate`` is ``"sum"`` (default), ``"mean"``
    or ``"max"``.
    """
    if aggregate not in AGGREGATES:
        raise ValueError(f"aggregate must be one of {AGGREGATES}")
    dims = sorted(set(int(d) for d in dims))
    if not dims:
        raise NoDimensionsSelected("no dimension selected for warping")
    per_dim = {d: warp_distance(q.row(d), t.row(d), radius, method) for d in dims}
    total = 0.0
    for d in dims:
        total += per_dim[d]
    if aggregate == "mean":
        total /= len(dims)
    elif aggregate == "max":
        total = max(per_dim.values())
    return WarpingResult(per_dim, total, frozenset(dims))
