"""Brute-force k-nearest-neighbor search.

The exact baseline for every classifier, and the ball-defining subroutine
for the asymptotic half-space proximal variants.  Results follow the
tie-canonical order (ascending distance, then ascending id), which makes
approximate-vs-exact recall well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import as_matrix, check_query, dists_to
from .errors import EmptyDatasetError


@dataclass(frozen=True)
class KnnResult:
    """Top-k neighbors: parallel (ids, dists) arrays plus the requested k."""

    ids: np.ndarray
    dists: np.ndarray
    k: int

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        dists = np.asarray(self.dists, dtype=np.float64)
        ids.flags.writeable = False
        dists.flags.writeable = False
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "dists", dists)

    def __len__(self) -> int:
        return int(self.ids.size)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(d)) for i, d in zip(self.ids, self.dists)]


def knn_search(data, query, k: int, exclude=None) -> KnnResult:
    """Exact top-k by (distance, id); ``exclude`` drops the given id(s).

    Asking for more neighbors than there are candidates returns them all.
    """
    mat = as_matrix(data)
    n = mat.shape[0]
    if n == 0:
        raise EmptyDatasetError("k-nearest-neighbor search over an empty dataset")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    q = check_query(query, mat.shape[1])

    ids = np.arange(n, dtype=np.int64)
    if exclude is not None:
        drop = np.atleast_1d(np.asarray(exclude, dtype=np.int64))
        ids = np.setdiff1d(ids, drop, assume_unique=True)
    d = dists_to(mat[ids], q)
    order = np.lexsort((ids, d))[: min(k, ids.size)]
    return KnnResult(ids=ids[order], dists=d[order], k=k)
