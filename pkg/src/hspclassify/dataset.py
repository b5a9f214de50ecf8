"""Vector storage, the labeled training corpus and the distance kernel.

Vectors are stored as float32 rows (the layout feature files dictate) while
every distance is accumulated in float64, so high-dimensional sums do not
lose mass to cancellation.  All other modules obtain distances through the
two kernels here, which keeps tie-breaking bit-for-bit consistent between
the exact and the approximate search paths.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DimensionMismatchError


def check_matrix(vectors, name: str = "vectors") -> np.ndarray:
    """Validate and coerce a 2-D array of vectors to C-contiguous float32.

    Rejects empty dimensions and non-finite components.
    """
    mat = np.ascontiguousarray(vectors, dtype=np.float32)
    if mat.ndim != 2:
        raise DataError(f"{name} must be a 2-D array, got shape {mat.shape}")
    if mat.shape[0] > 0 and mat.shape[1] < 1:
        raise DataError(f"{name} must have dimension >= 1")
    if not np.isfinite(mat).all():
        raise DataError(f"{name} contains non-finite components")
    return mat


def check_query(query, dim: int | None = None) -> np.ndarray:
    """Coerce a query (array-like or FeatureVector) to a finite float64 row."""
    if isinstance(query, FeatureVector):
        query = query.components
    q = np.asarray(query, dtype=np.float64).ravel()
    if q.size < 1:
        raise DataError("query must have dimension >= 1")
    if not np.isfinite(q).all():
        raise DataError("query contains non-finite components")
    if dim is not None and q.size != dim:
        raise DimensionMismatchError(
            f"query has dimension {q.size}, dataset has dimension {dim}"
        )
    return q


def check_labels(labels, n: int) -> np.ndarray:
    labs = np.asarray(labels)
    if labs.ndim != 1 or labs.shape[0] != n:
        raise DataError(f"expected {n} labels, got shape {labs.shape}")
    if labs.size and not np.issubdtype(labs.dtype, np.integer):
        as_int = labs.astype(np.int64)
        if not np.array_equal(as_int, labs):
            raise DataError("labels must be integers")
        labs = as_int
    labs = labs.astype(np.int64)
    if labs.size and labs.min() < 0:
        raise DataError("labels must be non-negative")
    return labs


@dataclass(frozen=True)
class FeatureVector:
    """One point of the metric space: a dense vector plus a stable id.

    ``id`` is the dataset ordinal for stored points; queries that do not
    live in any dataset use ``id=-1``.
    """

    id: int
    components: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=np.float32).ravel()
        if comps.size < 1:
            raise DataError("feature vector must have dimension >= 1")
        if not np.isfinite(comps).all():
            raise DataError("feature vector contains non-finite components")
        comps.flags.writeable = False
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return int(self.components.size)


class LabeledDataset:
    """Immutable training corpus: an (n, dim) float32 matrix plus labels.

    Ids are the storage ordinals 0..n-1.  ``num_classes`` is one more than
    the largest label; class ids may have gaps.
    """

    def __init__(self, vectors, labels):
        mat = check_matrix(vectors)
        labs = check_labels(labels, mat.shape[0])
        mat.flags.writeable = False
        labs.flags.writeable = False
        self._vectors = mat
        self._labels = labs
        self._fingerprint: int | None = None

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def n(self) -> int:
        return self._vectors.shape[0]

    @property
    def dim(self) -> int:
        return self._vectors.shape[1]

    @property
    def num_classes(self) -> int:
        return int(self._labels.max()) + 1 if self.n else 0

    def __len__(self) -> int:
        return self.n

    def vector(self, i: int) -> np.ndarray:
        return self._vectors[i]

    def feature_vector(self, i: int) -> FeatureVector:
        return FeatureVector(id=int(i), components=self._vectors[i])

    @property
    def fingerprint(self) -> int:
        """64-bit content hash binding search indexes to this dataset."""
        if self._fingerprint is None:
            self._fingerprint = matrix_fingerprint(self._vectors)
        return self._fingerprint


def as_matrix(data) -> np.ndarray:
    """Accept a LabeledDataset or bare matrix wherever only vectors matter."""
    if isinstance(data, LabeledDataset):
        return data.vectors
    return check_matrix(data)


def matrix_fingerprint(mat: np.ndarray) -> int:
    """64-bit content hash of a float32 vector matrix."""
    h = hashlib.blake2b(digest_size=8)
    h.update(np.int64(mat.shape[0]).tobytes())
    h.update(np.int64(mat.shape[1]).tobytes())
    h.update(np.ascontiguousarray(mat, dtype=np.float32).tobytes())
    return int.from_bytes(h.digest(), "little")


def data_fingerprint(data) -> int:
    """Fingerprint of a LabeledDataset (cached) or bare matrix."""
    if isinstance(data, LabeledDataset):
        return data.fingerprint
    return matrix_fingerprint(as_matrix(data))


def sq_dists_to(vectors: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances from every row of ``vectors`` to ``query``.

    This is the single distance kernel: float64 difference accumulation in
    index order, identical for every caller, so equal inputs always produce
    bit-identical distances.
    """
    if vectors.shape[-1] != query.shape[-1]:
        raise DimensionMismatchError(
            f"vectors have dimension {vectors.shape[-1]}, query has {query.shape[-1]}"
        )
    diff = vectors.astype(np.float64, copy=False) - query
    return np.einsum("ij,ij->i", diff, diff)


def dists_to(vectors: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Rooted Euclidean distances from every row of ``vectors`` to ``query``."""
    return np.sqrt(sq_dists_to(vectors, query))


def distance(a, b) -> float:
    """Euclidean distance between two vectors (or FeatureVectors)."""
    av = check_query(a)
    bv = check_query(b)
    if av.size != bv.size:
        raise DimensionMismatchError(
            f"dimension mismatch: {av.size} vs {bv.size}"
        )
    return float(dists_to(av[None, :], bv)[0])
