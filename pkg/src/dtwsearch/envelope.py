"""Warping envelopes: running max/min of a series over a radius ``w``.

``envelope_streaming`` maintains two monotonic double-ended queues and
needs at most ``3n`` comparisons between sample values.
``envelope_naive`` recomputes every window and serves as the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import InvalidInputError, as_series

__all__ = ["Envelope", "envelope_streaming", "envelope_naive", "streaming_envelope_kernel"]


@dataclass(frozen=True)
class Envelope:
    upper: np.ndarray
    lower: np.ndarray
    w: int

    def __len__(self) -> int:
        return self.upper.shape[0]

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(self.lower <= x) and np.all(x <= self.upper))


def _clamp_window(n: int, w: int) -> int:
    if w < 0:
        raise InvalidInputError(f"locality constraint must be >= 0, got {w}")
    return min(int(w), n - 1)


@njit(cache=True)
def streaming_envelope_kernel(y, w, upper, lower):
    """Fill ``upper``/``lower`` with the radius-``w`` envelope of ``y``.

    ``w`` must already be clamped to ``n - 1``. Returns the number of
    comparisons between sample values.

    Index ``j`` (emitted front-of-queue) is valid for window
    ``[j - w, j + w]``. Each index is appended once, so plain arrays
    with head/tail cursors serve as the queues.
    """
    n = y.shape[0]
    uq = np.empty(n, dtype=np.int64)
    lq = np.empty(n, dtype=np.int64)
    # live queue entries are uq[uh:ut], lq[lh:lt]
    uh = 0
    ut = 0
    lh = 0
    lt = 0
    uq[ut] = 0
    ut += 1
    lq[lt] = 0
    lt += 1
    count = 0
    span = 2 * w + 1
    for i in range(1, n):
        if i >= w + 1:
            upper[i - w - 1] = y[uq[uh]]
            lower[i - w - 1] = y[lq[lh]]
        count += 1
        if y[i] > y[i - 1]:
            ut -= 1
            while ut > uh:
                count += 1
                if y[i] > y[uq[ut - 1]]:
                    ut -= 1
                else:
                    break
        else:
            lt -= 1
            while lt > lh:
                count += 1
                if y[i] < y[lq[lt - 1]]:
                    lt -= 1
                else:
                    break
        uq[ut] = i
        ut += 1
        lq[lt] = i
        lt += 1
        if i == span + uq[uh]:
            uh += 1
        elif i == span + lq[lh]:
            lh += 1
    for i in range(n, n + w + 1):
        upper[i - w - 1] = y[uq[uh]]
        lower[i - w - 1] = y[lq[lh]]
        if i - uq[uh] >= span:
            uh += 1
        if i - lq[lh] >= span:
            lh += 1
    return count


def envelope_streaming(y, w: int, return_count: bool = False):
    """Envelope of ``y`` in linear time.

    With ``return_count=True`` also returns the number of comparisons
    between sample values the queue maintenance performed.
    """
    y = as_series(y, "y")
    wc = _clamp_window(y.shape[0], w)
    upper = np.empty_like(y)
    lower = np.empty_like(y)
    count = streaming_envelope_kernel(y, wc, upper, lower)
    upper.setflags(write=False)
    lower.setflags(write=False)
    env = Envelope(upper, lower, int(w))
    if return_count:
        return env, int(count)
    return env


def envelope_naive(y, w: int) -> Envelope:
    """Envelope by scanning each window ``[i - w, i + w]`` directly."""
    y = as_series(y, "y")
    n = y.shape[0]
    wc = _clamp_window(n, w)
    upper = np.empty(n)
    lower = np.empty(n)
    for i in range(n):
        window = y[max(0, i - wc): i + wc + 1]
        upper[i] = window.max()
        lower[i] = window.min()
    return Envelope(upper, lower, int(w))
