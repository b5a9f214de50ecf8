"""Feature-file ingestion: fvecs vectors, text labels, CSV fallback.

fvecs layout: repeated records of a little-endian int32 dimension followed
by that many little-endian float32 components; all records must agree on
the dimension.  Labels are one non-negative integer per line.  The CSV
fallback holds comma-separated floats with an integer label in the last
column, sniffed by the ``.csv`` extension.
"""

from __future__ import annotations

import numpy as np

from .dataset import LabeledDataset
from .errors import DataError, FormatError


def load_fvecs(path) -> np.ndarray:
    """Read an fvecs file into an (n, dim) float32 matrix."""
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size == 0:
        return np.empty((0, 0), dtype=np.float32)
    if raw.size < 4:
        raise FormatError(f"{path}: truncated record at byte 0")
    dim = int(raw[:4].view(np.int32)[0])
    if dim < 1:
        raise FormatError(f"{path}: invalid dimension {dim} at byte 0")
    record = 4 + 4 * dim
    n, leftover = divmod(raw.size, record)
    if leftover:
        raise FormatError(f"{path}: truncated record at byte {n * record}")
    table = raw.reshape(n, record)
    dims = table[:, :4].copy().view(np.int32).ravel()
    bad = np.flatnonzero(dims != dim)
    if bad.size:
        raise FormatError(
            f"{path}: inconsistent dimension {int(dims[bad[0]])} "
            f"(expected {dim}) at byte {int(bad[0]) * record}"
        )
    vectors = table[:, 4:].copy().view(np.float32).reshape(n, dim)
    if not np.isfinite(vectors).all():
        raise DataError(f"{path}: non-finite component in vector data")
    return vectors


def save_fvecs(path, vectors) -> None:
    mat = np.ascontiguousarray(vectors, dtype=np.float32)
    n, dim = mat.shape
    out = np.empty((n, 4 + 4 * dim), dtype=np.uint8)
    out[:, :4] = np.full((n, 1), dim, dtype=np.int32).view(np.uint8)
    out[:, 4:] = mat.view(np.uint8)
    out.tofile(path)


def load_labels(path) -> np.ndarray:
    """Read one non-negative integer label per line."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError:
                raise FormatError(f"{path}: non-integer label on line {lineno}")
            if value < 0:
                raise DataError(f"{path}: negative label on line {lineno}")
            labels.append(value)
    return np.asarray(labels, dtype=np.int64)


def save_labels(path, labels) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for value in np.asarray(labels, dtype=np.int64):
            fh.write(f"{int(value)}\n")


def load_csv_dataset(path) -> tuple[np.ndarray, np.ndarray]:
    """CSV fallback: float columns plus a trailing integer label column."""
    rows, labels = [], []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if width is None:
                width = len(parts)
                if width < 2:
                    raise FormatError(f"{path}: need floats plus a label column")
            elif len(parts) != width:
                raise FormatError(f"{path}: ragged row on line {lineno}")
            try:
                rows.append([float(p) for p in parts[:-1]])
                labels.append(int(parts[-1]))
            except ValueError:
                raise FormatError(f"{path}: unparsable value on line {lineno}")
    if not rows:
        return np.empty((0, 0), dtype=np.float32), np.empty(0, dtype=np.int64)
    mat = np.asarray(rows, dtype=np.float32)
    if not np.isfinite(mat).all():
        raise DataError(f"{path}: non-finite component in vector data")
    return mat, np.asarray(labels, dtype=np.int64)


def load_csv_vectors(path) -> np.ndarray:
    """CSV of float columns only (query files)."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise FormatError(f"{path}: ragged row on line {lineno}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise FormatError(f"{path}: unparsable value on line {lineno}")
    if not rows:
        return np.empty((0, 0), dtype=np.float32)
    mat = np.asarray(rows, dtype=np.float32)
    if not np.isfinite(mat).all():
        raise DataError(f"{path}: non-finite component in vector data")
    return mat


def load_vectors(path) -> np.ndarray:
    """Vectors from fvecs or CSV, sniffed by extension."""
    if str(path).lower().endswith(".csv"):
        return load_csv_vectors(path)
    return load_fvecs(path)


def load_dataset(data_path, labels_path=None) -> LabeledDataset:
    """Assemble a LabeledDataset from fvecs+labels or a single CSV."""
    if str(data_path).lower().endswith(".csv") and labels_path is None:
        vectors, labels = load_csv_dataset(data_path)
    else:
        if labels_path is None:
            raise FormatError("fvecs data needs a separate labels file")
        vectors = load_vectors(data_path)
        labels = load_labels(labels_path)
    if vectors.shape[0] != labels.shape[0]:
        raise DataError(
            f"vector/label count mismatch: {vectors.shape[0]} vectors, "
            f"{labels.shape[0]} labels"
        )
    return LabeledDataset(vectors, labels)
