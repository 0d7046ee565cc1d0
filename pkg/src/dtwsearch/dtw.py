"""Dynamic Time Warping under a Sakoe-Chiba band.

:func:`dtw` runs the O(nw) dynamic program over a rolling band buffer.
:func:`dtw_bruteforce` enumerates every minimal monotone warping path and is
only meant as a test oracle for short series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from numba import njit

from .core import InvalidInputError, SearchParams, as_series

__all__ = [
    "MAX_BRUTEFORCE_LENGTH",
    "WarpingPath",
    "dtw",
    "dtw_kernel",
    "cost_matrix",
    "dtw_bruteforce",
    "warping_paths",
]

MAX_BRUTEFORCE_LENGTH = 10


def exponent_code(p: float) -> float:
    """Encode ``p`` for the kernels: ``0.0`` stands for infinity."""
    return 0.0 if math.isinf(p) else float(p)


@njit(cache=True)
def _local_cost(a, b, p):
    d = abs(a - b)
    if p == 1.0 or p == 0.0:
        return d
    if p == 2.0:
        return d * d
    return d**p


@njit(cache=True)
def dtw_kernel(x, y, w, p):
    """Accumulated DTW cost (``p``-th power space; plain max for ``p == 0``).

    ``w`` must be clamped to ``n - 1``. Row ``i`` stores cell ``j`` at
    offset ``j - i + w``; the extra trailing slot is a permanent +inf.
    """
    n = x.shape[0]
    width = 2 * w + 1
    prev = np.full(width + 1, np.inf)
    cur = np.full(width + 1, np.inf)
    for i in range(n):
        for k in range(width + 1):
            cur[k] = np.inf
        jlo = max(0, i - w)
        jhi = min(n - 1, i + w)
        for j in range(jlo, jhi + 1):
            k = j - i + w
            c = _local_cost(x[i], y[j], p)
            if i == 0 and j == 0:
                best = 0.0
            else:
                best = np.inf
                if i > 0:
                    best = min(prev[k], prev[k + 1])
                if k > 0 and cur[k - 1] < best:
                    best = cur[k - 1]
            if p == 0.0:
                cur[k] = max(c, best)
            else:
                cur[k] = c + best
        prev, cur = cur, prev
    return prev[w]


def _finish(q: float, p: float) -> float:
    if math.isinf(p) or p == 1.0:
        return float(q)
    if p == 2.0:
        return math.sqrt(q)
    return float(q ** (1.0 / p))


def _check_pair(x, y):
    x = as_series(x, "x")
    y = as_series(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return x, y


def dtw(x, y, params: SearchParams) -> float:
    """DTW_p distance between equal-length series ``x`` and ``y``."""
    x, y = _check_pair(x, y)
    w = params.band(x.shape[0])
    q = dtw_kernel(x, y, w, exponent_code(params.p))
    return _finish(q, params.p)


def cost_matrix(x, y, params: SearchParams) -> np.ndarray:
    """Suffix-form accumulated cost table ``q`` of shape ``(n + 1, n + 1)``.

    ``q[i, j]`` is the cost of warping ``x[i:]`` onto ``y[j:]`` (p-th power
    space for finite ``p``). Cells outside the band hold ``inf`` and
    ``q[n, n] == 0``.
    """
    x, y = _check_pair(x, y)
    n = x.shape[0]
    w = params.band(n)
    p = params.p
    q = np.full((n + 1, n + 1), np.inf)
    q[n, n] = 0.0
    for i in range(n - 1, -1, -1):
        for j in range(n - 1, -1, -1):
            if abs(i - j) > w:
                continue
            tail = min(q[i + 1, j], q[i, j + 1], q[i + 1, j + 1])
            d = abs(x[i] - y[j])
            q[i, j] = max(d, tail) if math.isinf(p) else d**p + tail
    return q


@dataclass(frozen=True)
class WarpingPath:
    """Ordered matches ``(i, j)`` (0-based) between two length-``n`` series."""

    matches: Tuple[Tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.matches)

    def covers(self, n: int) -> bool:
        return {i for i, _ in self.matches} == set(range(n)) and {j for _, j in self.matches} == set(range(n))

    def is_monotone(self) -> bool:
        return all(a[0] <= b[0] and a[1] <= b[1] for a, b in zip(self.matches, self.matches[1:]))

    def is_minimal(self) -> bool:
        """No match can be dropped while still covering both series."""
        deg_x: dict = {}
        deg_y: dict = {}
        for i, j in self.matches:
            deg_x[i] = deg_x.get(i, 0) + 1
            deg_y[j] = deg_y.get(j, 0) + 1
        return all(deg_x[i] == 1 or deg_y[j] == 1 for i, j in self.matches)

    def band(self) -> int:
        return max(abs(i - j) for i, j in self.matches)

    def cost(self, x, y, p: float) -> float:
        diffs = np.array([x[i] - y[j] for i, j in self.matches])
        if math.isinf(p):
            return float(np.abs(diffs).max())
        return float(np.sum(np.abs(diffs) ** p) ** (1.0 / p))


def _enumerate_step_paths(n: int) -> List[Tuple[Tuple[int, int], ...]]:
    # a (1, 0) step next to a (0, 1) step leaves a droppable corner match
    out = []
    path = [(0, 0)]

    def walk(i, j, last):
        if i == n - 1 and j == n - 1:
            out.append(tuple(path))
            return
        for step in ((1, 1), (1, 0), (0, 1)):
            if last is not None and step != (1, 1) and last != (1, 1) and step != last:
                continue
            a, b = i + step[0], j + step[1]
            if a < n and b < n:
                path.append((a, b))
                walk(a, b, step)
                path.pop()

    walk(0, 0, None)
    return out


@lru_cache(maxsize=None)
def warping_paths(n: int) -> Tuple[WarpingPath, ...]:
    """All minimal monotone warping paths between two length-``n`` series."""
    if n < 1 or n > MAX_BRUTEFORCE_LENGTH:
        raise InvalidInputError(f"path enumeration limited to 1 <= n <= {MAX_BRUTEFORCE_LENGTH}, got {n}")
    paths = (WarpingPath(m) for m in _enumerate_step_paths(n))
    return tuple(pth for pth in paths if pth.is_minimal())


@lru_cache(maxsize=None)
def _path_tables(n: int):
    paths = warping_paths(n)
    longest = max(len(pth) for pth in paths)
    ii = np.zeros((len(paths), longest), dtype=np.intp)
    jj = np.zeros((len(paths), longest), dtype=np.intp)
    mask = np.zeros((len(paths), longest), dtype=bool)
    for r, pth in enumerate(paths):
        m = len(pth)
        ii[r, :m] = [a for a, _ in pth.matches]
        jj[r, :m] = [b for _, b in pth.matches]
        mask[r, :m] = True
    bands = np.array([pth.band() for pth in paths])
    return ii, jj, mask, bands


def dtw_bruteforce(x, y, params: SearchParams, return_path: bool = False):
    """Minimum path cost over every minimal monotone warping path in the band.

    Exponential in ``n``; refuses series longer than
    :data:`MAX_BRUTEFORCE_LENGTH`.
    """
    x, y = _check_pair(x, y)
    n = x.shape[0]
    if n > MAX_BRUTEFORCE_LENGTH:
        raise InvalidInputError(f"brute force refused for n={n} > {MAX_BRUTEFORCE_LENGTH}")
    ii, jj, mask, bands = _path_tables(n)
    d = np.abs(x[ii] - y[jj])
    d[~mask] = 0.0
    p = params.p
    if math.isinf(p):
        costs = d.max(axis=1)
    else:
        costs = np.sum(d**p, axis=1)
    costs = np.where(bands <= params.w, costs, np.inf)
    r = int(np.argmin(costs))
    value = _finish(costs[r], p)
    if return_path:
        return value, warping_paths(n)[r]
    return value
