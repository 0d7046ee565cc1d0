"""Seeded synthetic series generators.

Every series draws from its own PCG64 stream. Databases derive the stream
of instance ``k`` of class ``c`` from ``SeedSequence(seed, spawn_key=(family,
c, k))`` so that a member does not depend on how many others are generated.

Family definitions (``t = 1..n``, ``N`` standard normal, ``U`` uniform):

RANDOM_WALK
    ``x_1 = 0``, ``x_t = x_{t-1} + N``.
WHITE_NOISE
    ``x_t = N``.
CBF (n = 128)
    Onset ``a ~ U{n/8 .. n/4}``, duration ``b - a ~ U{n/4 .. 3n/4}``,
    amplitude ``6 + N``, plus unit noise on every sample. Class 1 is a
    plateau on ``[a, b]``, class 2 ramps up over it, class 3 ramps down.
CONTROL_CHART (n = 60)
    Base ``30 + 2 r`` with ``r ~ U(-3, 3)`` per sample. Classes: 1 normal,
    2 cyclic (``a sin(2 pi t / T)``, ``a, T ~ U(10, 15)``), 3/4 increasing/
    decreasing trend (slope ``U(0.2, 0.5)``), 5/6 upward/downward shift of
    ``U(7.5, 20)`` from ``t_0 ~ U{n/3 .. 2n/3}`` on.
WAVEFORM (n = 21)
    Convex mix ``u h_a + (1 - u) h_b + N`` with ``u ~ U(0, 1)`` of the hat
    functions ``h1(t) = max(6 - |t - 11|, 0)``, ``h2(t) = h1(t - 4)``,
    ``h3(t) = h1(t + 4)``; classes mix (h1, h2), (h1, h3), (h2, h3).
WAVE_NOISE (n = 40)
    A WAVEFORM series followed by ``n - 21`` pure ``N`` samples.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Dataset, InvalidInputError

__all__ = ["Family", "GeneratorSpec", "generate", "generate_database", "series_seed", "rng_for"]


class Family(enum.Enum):
    RANDOM_WALK = "random-walk"
    WHITE_NOISE = "white-noise"
    CBF = "cbf"
    CONTROL_CHART = "control-chart"
    WAVEFORM = "waveform"
    WAVE_NOISE = "wave-noise"

    @classmethod
    def parse(cls, text: str) -> "Family":
        key = str(text).strip().lower().replace("_", "-")
        aliases = {"rw": "random-walk", "noise": "white-noise", "cc": "control-chart", "wave+noise": "wave-noise"}
        key = aliases.get(key, key)
        for fam in cls:
            if fam.value == key:
                return fam
        raise InvalidInputError(f"unknown family {text!r}")

    @property
    def classes(self) -> int:
        """Number of classes (0 for unlabeled families)."""
        return _CLASSES[self]

    @property
    def default_length(self) -> int:
        return _LENGTHS[self]


_CLASSES = {
    Family.RANDOM_WALK: 0,
    Family.WHITE_NOISE: 0,
    Family.CBF: 3,
    Family.CONTROL_CHART: 6,
    Family.WAVEFORM: 3,
    Family.WAVE_NOISE: 3,
}
_LENGTHS = {
    Family.RANDOM_WALK: 256,
    Family.WHITE_NOISE: 100,
    Family.CBF: 128,
    Family.CONTROL_CHART: 60,
    Family.WAVEFORM: 21,
    Family.WAVE_NOISE: 40,
}
_FAMILY_CODE = {fam: i for i, fam in enumerate(Family)}


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    class_id: Optional[int] = None
    n: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        fam = self.family if isinstance(self.family, Family) else Family.parse(self.family)
        object.__setattr__(self, "family", fam)
        if self.n is None:
            object.__setattr__(self, "n", fam.default_length)
        if self.n < 1:
            raise InvalidInputError("length must be positive")
        if fam.classes:
            cid = 1 if self.class_id is None else self.class_id
            if not 1 <= cid <= fam.classes:
                raise InvalidInputError(f"class {cid} invalid for {fam.value} (1..{fam.classes})")
            object.__setattr__(self, "class_id", int(cid))
        elif self.class_id not in (None, 0, 1):
            raise InvalidInputError(f"{fam.value} has no classes")
        if fam is Family.WAVEFORM and self.n != 21:
            raise InvalidInputError("waveform series have exactly 21 samples")
        if fam is Family.WAVE_NOISE and self.n < 21:
            raise InvalidInputError("wave+noise series need at least 21 samples")
        if fam is Family.CBF and self.n < 8:
            raise InvalidInputError("cbf series need at least 8 samples")


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


def series_seed(seed: int, family: Family, class_id: int, instance: int) -> int:
    """64-bit seed of instance ``instance`` of ``class_id`` in a database seeded by ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_FAMILY_CODE[family], int(class_id), int(instance)))
    return int(ss.generate_state(1, np.uint64)[0])


def _hat(t):
    return np.maximum(6.0 - np.abs(t - 11.0), 0.0)


def _waveform(rng, class_id, n):
    t = np.arange(1, 22, dtype=np.float64)
    h1, h2, h3 = _hat(t), _hat(t - 4.0), _hat(t + 4.0)
    a, b = {1: (h1, h2), 2: (h1, h3), 3: (h2, h3)}[class_id]
    u = rng.uniform(0.0, 1.0)
    wave = u * a + (1.0 - u) * b + rng.standard_normal(21)
    if n > 21:
        wave = np.concatenate([wave, rng.standard_normal(n - 21)])
    return wave


def _cbf(rng, class_id, n):
    t = np.arange(1, n + 1, dtype=np.float64)
    a = rng.integers(n // 8, n // 4 + 1)
    b = a + rng.integers(n // 4, 3 * n // 4 + 1)
    eta = rng.standard_normal()
    eps = rng.standard_normal(n)
    inside = ((t >= a) & (t <= b)).astype(np.float64)
    if class_id == 1:
        shape = inside
    elif class_id == 2:
        shape = inside * (t - a) / (b - a)
    else:
        shape = inside * (b - t) / (b - a)
    return (6.0 + eta) * shape + eps


def _control_chart(rng, class_id, n):
    t = np.arange(1, n + 1, dtype=np.float64)
    base = 30.0 + 2.0 * rng.uniform(-3.0, 3.0, n)
    if class_id == 1:
        return base
    if class_id == 2:
        amp = rng.uniform(10.0, 15.0)
        period = rng.uniform(10.0, 15.0)
        return base + amp * np.sin(2.0 * np.pi * t / period)
    if class_id in (3, 4):
        slope = rng.uniform(0.2, 0.5)
        return base + (slope if class_id == 3 else -slope) * t
    shift = rng.uniform(7.5, 20.0)
    onset = rng.integers(n // 3, 2 * n // 3 + 1)
    step = (t >= onset).astype(np.float64) * shift
    return base + (step if class_id == 5 else -step)


def generate(spec: GeneratorSpec) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    fam, n = spec.family, spec.n
    if fam is Family.RANDOM_WALK:
        x = np.empty(n)
        x[0] = 0.0
        x[1:] = np.cumsum(rng.standard_normal(n - 1))
        return x
    if fam is Family.WHITE_NOISE:
        return rng.standard_normal(n)
    if fam is Family.CBF:
        return _cbf(rng, spec.class_id, n)
    if fam is Family.CONTROL_CHART:
        return _control_chart(rng, spec.class_id, n)
    return _waveform(rng, spec.class_id, n)


def generate_database(
    family,
    classes: Optional[int] = None,
    instances_per_class: int = 1,
    n: Optional[int] = None,
    seed: int = 0,
    instance_offset: int = 0,
) -> Dataset:
    """``classes * instances_per_class`` labeled series, grouped by class.

    ``classes`` defaults to every class of the family (a single pseudo-class
    labeled 1 for unlabeled families). ``instance_offset`` shifts the
    instance numbering, giving disjoint draws from the same seed.
    """
    fam = family if isinstance(family, Family) else Family.parse(family)
    if classes is None:
        classes = fam.classes or 1
    if classes < 1 or instances_per_class < 0:
        raise InvalidInputError("classes must be >= 1 and instances_per_class >= 0")
    if fam.classes and classes > fam.classes:
        raise InvalidInputError(f"{fam.value} has only {fam.classes} classes")
    if not fam.classes and classes != 1:
        raise InvalidInputError(f"{fam.value} has no classes")
    length = fam.default_length if n is None else n
    rows, labels = [], []
    for c in range(1, classes + 1):
        for k in range(instance_offset, instance_offset + instances_per_class):
            spec = GeneratorSpec(fam, c if fam.classes else None, length, series_seed(seed, fam, c, k))
            rows.append(generate(spec))
            labels.append(c)
    if not rows:
        return Dataset(np.empty((0, length)), np.empty(0, dtype=np.int64))
    return Dataset(np.array(rows), labels)
