"""LB_Keogh and LB_Improved lower bounds on DTW.

Both bounds accept an optional ``abandon_at`` threshold: the scan stops as
soon as the partial sum reaches it, and the returned value is then only
guaranteed to be ``>= abandon_at``. Pass ``return_abandoned=True`` to get a
``(value, abandoned)`` pair.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from numba import njit

from .core import InvalidInputError, UnsupportedExponentError, as_series, check_exponent
from .dtw import exponent_code
from .envelope import Envelope, streaming_envelope_kernel

__all__ = ["project", "lb_keogh", "lb_improved", "keogh_kernel"]


@njit(cache=True)
def keogh_kernel(x, upper, lower, p, limit, h):
    """One LB_Keogh pass of ``x`` against an envelope.

    Writes the projection of ``x`` into ``h`` and returns
    ``(acc, abandoned, comparisons)`` where ``acc`` is the p-th power sum
    (the max for ``p == 0``). Stops early once ``acc >= limit``; ``h`` is
    then only partially filled.
    """
    n = x.shape[0]
    acc = 0.0
    comparisons = 0
    for i in range(n):
        xi = x[i]
        comparisons += 1
        if xi > upper[i]:
            d = xi - upper[i]
            h[i] = upper[i]
        else:
            comparisons += 1
            if xi < lower[i]:
                d = lower[i] - xi
                h[i] = lower[i]
            else:
                h[i] = xi
                continue
        if p == 0.0:
            if d > acc:
                acc = d
        elif p == 1.0:
            acc += d
        elif p == 2.0:
            acc += d * d
        else:
            acc += d**p
        if acc >= limit:
            return acc, True, comparisons
    return acc, False, comparisons


def _limit(abandon_at: Optional[float], p: float) -> float:
    if abandon_at is None:
        return np.inf
    if abandon_at < 0:
        raise InvalidInputError("abandon_at must be non-negative")
    if math.isinf(p) or p == 1.0:
        return float(abandon_at)
    return float(abandon_at) ** p


def _root(acc: float, p: float) -> float:
    if math.isinf(p) or p == 1.0:
        return float(acc)
    if p == 2.0:
        return math.sqrt(acc)
    return float(acc ** (1.0 / p))


def _check_env(x: np.ndarray, env: Envelope):
    if x.shape[0] != len(env):
        raise InvalidInputError(f"length mismatch: series {x.shape[0]} vs envelope {len(env)}")


def project(x, env: Envelope) -> np.ndarray:
    """Clamp ``x`` componentwise into ``[env.lower, env.upper]``."""
    x = as_series(x, "x")
    _check_env(x, env)
    return np.minimum(np.maximum(x, env.lower), env.upper)


def lb_keogh(x, env: Envelope, p: float = 1.0, abandon_at: Optional[float] = None, return_abandoned: bool = False):
    """l_p distance from ``x`` to the envelope of another series."""
    x = as_series(x, "x")
    _check_env(x, env)
    p = check_exponent(p)
    h = np.empty_like(x)
    acc, abandoned, _ = keogh_kernel(x, env.upper, env.lower, exponent_code(p), _limit(abandon_at, p), h)
    value = _root(acc, p)
    return (value, bool(abandoned)) if return_abandoned else value


def lb_improved(
    x,
    y,
    env: Envelope,
    p: float = 1.0,
    abandon_at: Optional[float] = None,
    return_abandoned: bool = False,
):
    """Two-pass bound: LB_Keogh(x, y) plus LB_Keogh(y, H(x, y)) in p-th power space.

    ``env`` must be the envelope of ``y``; the envelope of the projection
    ``H(x, y)`` is rebuilt with the same ``env.w``. Finite ``p`` only.
    """
    p = check_exponent(p)
    if math.isinf(p):
        raise UnsupportedExponentError("LB_Improved is defined for finite p only")
    x = as_series(x, "x")
    y = as_series(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    _check_env(x, env)
    limit = _limit(abandon_at, p)
    h = np.empty_like(x)
    acc, abandoned, _ = keogh_kernel(x, env.upper, env.lower, p, limit, h)
    if not abandoned:
        n = x.shape[0]
        upper = np.empty_like(h)
        lower = np.empty_like(h)
        streaming_envelope_kernel(h, min(env.w, n - 1), upper, lower)
        scratch = np.empty_like(y)
        acc2, abandoned, _ = keogh_kernel(y, upper, lower, p, limit - acc, scratch)
        acc += acc2
    value = _root(acc, p)
    return (value, bool(abandoned)) if return_abandoned else value
