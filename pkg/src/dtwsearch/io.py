"""Dataset file formats.

Binary layout (all little-endian)::

    b"TSDB1\\0"  | count: uint32 | n: uint32 | count*n float64, row-major

Labels for a binary file live in a sidecar ``<path>.labels`` holding one
integer per line. CSV files hold one series per line; when ``labeled`` is
set the first column is the integer class id.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Dataset, DataFormatError

__all__ = ["MAGIC", "load_dataset", "save_dataset", "infer_format", "label_path"]

MAGIC = b"TSDB1\x00"
_HEADER = struct.Struct("<6sII")


def infer_format(path) -> str:
    return "csv" if str(path).lower().endswith((".csv", ".txt")) else "bin"


def label_path(path) -> Path:
    return Path(str(path) + ".labels")


def save_dataset(ds: Dataset, path, format: Optional[str] = None, labeled: Optional[bool] = None) -> None:
    """Write ``ds``. Binary files get a label sidecar; CSV gets a label column only if ``labeled``."""
    fmt = format or infer_format(path)
    path = Path(path)
    if labeled is None:
        # sidecar labels are harmless; a CSV label column must be asked for
        labeled = ds.labels is not None and fmt == "bin"
    if labeled and ds.labels is None:
        raise DataFormatError("cannot write labels: dataset is unlabeled")
    if fmt == "bin":
        count, n = ds.series.shape
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, count, n))
            fh.write(np.ascontiguousarray(ds.series, dtype="<f8").tobytes())
        if labeled:
            label_path(path).write_text("".join(f"{int(c)}\n" for c in ds.labels))
    elif fmt == "csv":
        with open(path, "w") as fh:
            for i, row in enumerate(ds.series):
                cells = [repr(float(v)) for v in row]
                if labeled:
                    cells.insert(0, str(int(ds.labels[i])))
                fh.write(",".join(cells) + "\n")
    else:
        raise DataFormatError(f"unknown format {fmt!r}")


def load_dataset(path, format: Optional[str] = None, labeled: bool = False) -> Dataset:
    """Load a dataset. For binary files a sidecar label file is picked up if present."""
    fmt = format or infer_format(path)
    if fmt == "bin":
        return _load_bin(Path(path))
    if fmt == "csv":
        return _load_csv(Path(path), labeled)
    raise DataFormatError(f"unknown format {fmt!r}")


def _load_bin(path: Path) -> Dataset:
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise DataFormatError("truncated header")
    magic, count, n = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataFormatError("malformed header: bad magic bytes")
    if count == 0:
        raise DataFormatError("empty dataset")
    if n == 0:
        raise DataFormatError("malformed header: zero series length")
    expected = _HEADER.size + 8 * count * n
    if len(raw) != expected:
        raise DataFormatError(f"size mismatch: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(count, n).astype(np.float64)
    bad = ~np.isfinite(data)
    if bad.any():
        row = int(np.argwhere(bad)[0][0])
        raise DataFormatError(f"row {row}: non-finite sample")
    labels = None
    lp = label_path(path)
    if lp.exists():
        lines = [ln for ln in lp.read_text().splitlines() if ln.strip()]
        try:
            labels = [int(ln) for ln in lines]
        except ValueError as exc:
            raise DataFormatError(f"{lp}: non-integer label") from exc
        if len(labels) != count:
            raise DataFormatError(f"{lp}: {len(labels)} labels for {count} series")
    return Dataset(data, labels)


def _load_csv(path: Path, labeled: bool) -> Dataset:
    rows, labels = [], []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if labeled:
                try:
                    labels.append(int(cells[0]))
                except ValueError as exc:
                    raise DataFormatError(f"row {lineno}: bad class id {cells[0]!r}") from exc
                cells = cells[1:]
            try:
                values = [float(c) for c in cells]
            except ValueError as exc:
                raise DataFormatError(f"row {lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in values):
                raise DataFormatError(f"row {lineno}: non-finite sample")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataFormatError(f"row {lineno}: ragged row of length {len(values)}, expected {width}")
            if not values:
                raise DataFormatError(f"row {lineno}: no samples")
            rows.append(values)
    if not rows:
        raise DataFormatError("empty dataset")
    return Dataset(np.array(rows, dtype=np.float64), labels if labeled else None)
