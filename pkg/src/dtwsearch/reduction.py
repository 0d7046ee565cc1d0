"""Piecewise-sum dimensionality reduction and l1 point/rectangle geometry.

The cover splits ``0..n-1`` into ``d`` contiguous intervals of
``floor(n / d)`` samples, the last one absorbing the remainder. The l1
distance from a projected series to the projected envelope of a query
lower-bounds LB_Keogh at ``p = 1`` and therefore DTW_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .core import InvalidInputError
from .envelope import Envelope

__all__ = [
    "DEFAULT_DIMENSIONS",
    "PiecewiseCover",
    "Hyperrectangle",
    "make_cover",
    "project_series",
    "project_rows",
    "envelope_rect",
    "rect_dist_l1",
]

DEFAULT_DIMENSIONS = 8


@dataclass(frozen=True)
class PiecewiseCover:
    n: int
    starts: Tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.starts)

    def intervals(self) -> List[Tuple[int, int]]:
        """Half-open ``(start, stop)`` index pairs."""
        stops = self.starts[1:] + (self.n,)
        return list(zip(self.starts, stops))


@dataclass(frozen=True)
class Hyperrectangle:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64).reshape(-1)
        hi = np.asarray(self.hi, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape:
            raise InvalidInputError("rectangle corners differ in dimension")
        if np.any(lo > hi):
            raise InvalidInputError("rectangle has lo > hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self) -> int:
        return self.lo.shape[0]


def make_cover(n: int, d: int = DEFAULT_DIMENSIONS) -> PiecewiseCover:
    if d < 1 or d > n:
        raise InvalidInputError(f"cover needs 1 <= d <= n, got d={d}, n={n}")
    step = n // d
    return PiecewiseCover(int(n), tuple(j * step for j in range(d)))


def project_series(x, cover: PiecewiseCover) -> np.ndarray:
    """Per-interval sums of ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != cover.n:
        raise InvalidInputError(f"cover built for n={cover.n}, series has shape {x.shape}")
    return np.add.reduceat(x, cover.starts)


def project_rows(rows, cover: PiecewiseCover) -> np.ndarray:
    """:func:`project_series` applied to each row of a 2-D array."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != cover.n:
        raise InvalidInputError(f"cover built for n={cover.n}, rows have shape {rows.shape}")
    if rows.shape[0] == 0:
        return np.empty((0, cover.d))
    return np.add.reduceat(rows, cover.starts, axis=1)


def envelope_rect(env: Envelope, cover: PiecewiseCover) -> Hyperrectangle:
    return Hyperrectangle(project_series(env.lower, cover), project_series(env.upper, cover))


def rect_dist_l1(pt, rect: Hyperrectangle) -> float:
    pt = np.asarray(pt, dtype=np.float64).reshape(-1)
    if pt.shape[0] != rect.d:
        raise InvalidInputError(f"dimension mismatch: point {pt.shape[0]} vs rectangle {rect.d}")
    gap = np.maximum(rect.lo - pt, 0.0) + np.maximum(pt - rect.hi, 0.0)
    return float(gap.sum())
