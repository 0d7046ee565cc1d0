"""Value types, l_p arithmetic and error classes shared across the package.

Time series are plain one-dimensional ``float64`` numpy arrays. Use
:func:`as_series` at API boundaries to validate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "INF",
    "InvalidInputError",
    "DataFormatError",
    "UnsupportedExponentError",
    "EmptyDatabaseError",
    "as_series",
    "check_exponent",
    "parse_exponent",
    "parse_window",
    "SearchParams",
    "Dataset",
    "lp_norm",
    "lp_dist",
    "point_interval_dist",
]

INF = math.inf

Exponent = Union[int, float]


class InvalidInputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class DataFormatError(InvalidInputError):
    """Raised when a dataset file cannot be parsed."""


class UnsupportedExponentError(InvalidInputError):
    """Raised when an operation does not support the requested norm exponent."""


class EmptyDatabaseError(InvalidInputError):
    """Raised when a search is run against an empty database."""


def as_series(x, name: str = "series") -> np.ndarray:
    """Return ``x`` as a validated, read-only 1-D float64 array."""
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite samples")
    arr.setflags(write=False)
    return arr


def check_exponent(p: Exponent) -> float:
    p = float(p)
    if not (p >= 1.0):
        raise InvalidInputError(f"norm exponent must be >= 1 or inf, got {p}")
    return p


def parse_exponent(text: str) -> float:
    """Parse ``"1"``, ``"2"``, ``"inf"`` (or ``"infinity"``) into an exponent."""
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        return check_exponent(float(t))
    except ValueError as exc:
        raise InvalidInputError(f"invalid norm exponent {text!r}") from exc


@dataclass(frozen=True)
class SearchParams:
    """Norm exponent ``p`` and Sakoe-Chiba locality constraint ``w``.

    ``w`` is an absolute number of samples; the band actually used on
    series of length ``n`` is ``min(w, n - 1)``.
    """

    p: float = 1.0
    w: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", check_exponent(self.p))
        if int(self.w) != self.w or self.w < 0:
            raise InvalidInputError(f"locality constraint must be a non-negative integer, got {self.w}")
        object.__setattr__(self, "w", int(self.w))

    @classmethod
    def from_percent(cls, n: int, percent: float = 10.0, p: Exponent = 1.0) -> "SearchParams":
        """Band of ``floor(n * percent / 100)`` samples (10% by default)."""
        if percent < 0:
            raise InvalidInputError("percentage must be non-negative")
        return cls(p=p, w=int(math.floor(n * percent / 100.0 + 1e-9)))

    def band(self, n: int) -> int:
        return min(self.w, n - 1)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.p)


def parse_window(text: str, n: int) -> int:
    """Parse a CLI window spec: an integer number of samples or ``"P%"`` of ``n``."""
    t = str(text).strip()
    if t.endswith("%"):
        try:
            pct = float(t[:-1])
        except ValueError as exc:
            raise InvalidInputError(f"invalid window {text!r}") from exc
        return SearchParams.from_percent(n, pct).w
    try:
        w = int(t)
    except ValueError as exc:
        raise InvalidInputError(f"invalid window {text!r}") from exc
    if w < 0:
        raise InvalidInputError(f"invalid window {text!r}")
    return w


@dataclass(frozen=True)
class Dataset:
    """An immutable collection of equal-length series with optional labels."""

    series: np.ndarray
    labels: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        arr = np.array(self.series, dtype=np.float64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise InvalidInputError("dataset series must form a 2-D array of equal-length rows")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("dataset contains non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "series", arr)
        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64).reshape(-1)
            if labels.shape[0] != arr.shape[0]:
                raise InvalidInputError(
                    f"{labels.shape[0]} labels for {arr.shape[0]} series"
                )
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], labels=None) -> "Dataset":
        lengths = {len(r) for r in rows}
        if len(lengths) > 1:
            raise InvalidInputError(f"ragged rows: lengths {sorted(lengths)}")
        return cls(np.array(rows, dtype=np.float64).reshape(len(rows), -1), labels)

    def __len__(self) -> int:
        return self.series.shape[0]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.series[i]

    @property
    def length(self) -> int:
        """Common series length ``n``."""
        return self.series.shape[1]

    def head(self, count: int) -> "Dataset":
        """The first ``count`` members (labels included)."""
        labels = None if self.labels is None else self.labels[:count]
        return Dataset(self.series[:count], labels)


def lp_norm(x, p: Exponent) -> float:
    """l_p norm of ``x``; ``p = inf`` gives the max norm."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise InvalidInputError("norm of an empty series")
    p = check_exponent(p)
    a = np.abs(x)
    if math.isinf(p):
        return float(a.max())
    if p == 1.0:
        return float(a.sum())
    if p == 2.0:
        return float(math.sqrt(np.dot(a, a)))
    return float(np.sum(a**p) ** (1.0 / p))


def lp_dist(x, y, p: Exponent) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InvalidInputError(f"length mismatch: {x.shape} vs {y.shape}")
    return lp_norm(x - y, p)


def point_interval_dist(v: float, lo: float, hi: float) -> float:
    """Distance from ``v`` to the closed interval ``[lo, hi]``."""
    if lo > hi:
        raise InvalidInputError(f"empty interval [{lo}, {hi}]")
    if v < lo:
        return lo - v
    if v > hi:
        return v - hi
    return 0.0
