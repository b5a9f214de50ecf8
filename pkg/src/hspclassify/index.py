"""Layered small-world proximity-graph index for approximate kNN.

Points are inserted incrementally: each draws a geometric level, greedily
descends from the entry point through the upper layers, beam-searches its
own layers and links to the closest neighbors found, with degree bounds
enforced by pruning.  Neighbor selection during insertion uses the plain
closest-M rule, which keeps the structure easy to audit.

Build and search are deterministic for a fixed seed; two builds over the
same data serialize byte-identically.
"""

from __future__ import annotations

import heapq
import math
import struct
from dataclasses import dataclass

import numpy as np

from .dataset import as_matrix, check_query, data_fingerprint, sq_dists_to
from .errors import EmptyDatasetError, FormatError, StaleIndexError
from .knn import KnnResult

MAGIC = b"HSPX"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class IndexParams:
    """Build/search knobs: degree bound, beam widths, level factor, seed."""

    max_neighbors: int = 16
    ef_construction: int = 200
    ef_search: int = 100
    level_scale: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_neighbors < 2:
            raise ValueError("max_neighbors must be >= 2")
        if self.ef_construction < 1 or self.ef_search < 1:
            raise ValueError("beam widths must be >= 1")
        if self.level_scale is not None and self.level_scale <= 0:
            raise ValueError("level_scale must be positive")
        if not -(2**63) <= self.seed < 2**63:
            raise ValueError("seed must fit a signed 64-bit integer")

    @property
    def resolved_level_scale(self) -> float:
        if self.level_scale is not None:
            return float(self.level_scale)
        return 1.0 / math.log(self.max_neighbors)


class SmallWorldIndex:
    """Frozen multi-layer graph over dataset ids; searches need the dataset.

    ``layers[lev]`` maps node id -> neighbor id list.  Every node lives on
    level 0 and membership is nested upward.  The index stores only graph
    structure plus a fingerprint of the vectors it was built from; attach
    the matching dataset before searching.
    """

    def __init__(self, layers, entry_point, params, dataset_fingerprint):
        self.layers = layers
        self.entry_point = entry_point
        self.params = params
        self.dataset_fingerprint = dataset_fingerprint
        self._vectors: np.ndarray | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def build(cls, data, params: IndexParams | None = None) -> "SmallWorldIndex":
        params = params or IndexParams()
        mat = as_matrix(data)
        n = mat.shape[0]
        if n == 0:
            raise EmptyDatasetError("cannot index an empty dataset")
        scale = params.resolved_level_scale
        rng = np.random.default_rng(params.seed)
        # 1 - U keeps the draw in (0, 1] so the log never sees zero
        levels = np.floor(-np.log(1.0 - rng.random(n)) * scale).astype(np.int64)

        index = cls(
            layers=[{}],
            entry_point=-1,
            params=params,
            dataset_fingerprint=data_fingerprint(data),
        )
        index._vectors = mat
        for i in range(n):
            index._insert(mat, i, int(levels[i]))
        return index

    def _insert(self, mat, i: int, level: int) -> None:
        m = self.params.max_neighbors
        if self.entry_point < 0:
            while len(self.layers) <= level:
                self.layers.append({})
            for lev in range(level + 1):
                self.layers[lev][i] = []
            self.entry_point = i
            return

        q = mat[i].astype(np.float64)
        top = len(self.layers) - 1
        eps = [self.entry_point]
        for lev in range(top, level, -1):
            found = self._search_layer(mat, self.layers[lev], q, eps, ef=1)
            eps = [found[0][1]]
        for lev in range(min(level, top), -1, -1):
            # link to the closest m; lists may grow to the cap (2m on the
            # base layer) through back-links before pruning kicks in, which
            # keeps older nodes reachable as the graph densifies
            cap = 2 * m if lev == 0 else m
            found = self._search_layer(
                mat, self.layers[lev], q, eps, ef=self.params.ef_construction
            )
            neighbors = [e for _, e in found[:m]]
            self.layers[lev][i] = neighbors
            for j in neighbors:
                lst = self.layers[lev][j]
                lst.append(i)
                if len(lst) > cap:
                    self.layers[lev][j] = self._prune(mat, j, lst, cap)
            eps = [e for _, e in found]
        for lev in range(top + 1, level + 1):
            self.layers.append({i: []})
            self.entry_point = i

    @staticmethod
    def _prune(mat, j: int, ids: list[int], bound: int) -> list[int]:
        """Keep the ``bound`` candidates closest to node j, ties by id."""
        arr = np.asarray(ids, dtype=np.int64)
        d = sq_dists_to(mat[arr], mat[j].astype(np.float64))
        keep = np.lexsort((arr, d))[:bound]
        return [int(arr[t]) for t in keep]

    @staticmethod
    def _search_layer(mat, adj, q, entry_ids, ef: int) -> list[tuple[float, int]]:
        """Best-first beam over one layer; returns (sq_dist, id) ascending."""
        starts = sorted(set(entry_ids))
        d0 = sq_dists_to(mat[starts], q)
        visited = set(starts)
        cand = list(zip(d0.tolist(), starts))
        heapq.heapify(cand)
        result = [(-d, -e) for d, e in cand]
        heapq.heapify(result)
        while len(result) > ef:
            heapq.heappop(result)
        while cand:
            d_c, c = heapq.heappop(cand)
            if d_c > -result[0][0] and len(result) >= ef:
                break
            fresh = [e for e in adj[c] if e not in visited]
            if not fresh:
                continue
            visited.update(fresh)
            dn = sq_dists_to(mat[fresh], q)
            for d_e, e in zip(dn.tolist(), fresh):
                if len(result) < ef or d_e < -result[0][0]:
                    heapq.heappush(cand, (d_e, e))
                    heapq.heappush(result, (-d_e, -e))
                    if len(result) > ef:
                        heapq.heappop(result)
        return sorted((-d, -e) for d, e in result)

    # -- queries ----------------------------------------------------------

    def attach(self, data) -> "SmallWorldIndex":
        """Bind a dataset to search against; must match the build fingerprint."""
        if data_fingerprint(data) != self.dataset_fingerprint:
            raise StaleIndexError("index was built over different data")
        self._vectors = as_matrix(data)
        return self

    def _require_vectors(self) -> np.ndarray:
        if self._vectors is None:
            raise StaleIndexError("index has no attached dataset; call attach()")
        return self._vectors

    def search(self, query, k: int, ef_search: int | None = None) -> KnnResult:
        """Approximate top-k in (distance, id) order; beam width >= k."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        mat = self._require_vectors()
        q = check_query(query, mat.shape[1])
        ef = max(ef_search if ef_search is not None else self.params.ef_search, k)
        eps = [self.entry_point]
        for lev in range(len(self.layers) - 1, 0, -1):
            found = self._search_layer(mat, self.layers[lev], q, eps, ef=1)
            eps = [found[0][1]]
        found = self._search_layer(mat, self.layers[0], q, eps, ef=ef)
        ids = np.array([e for _, e in found], dtype=np.int64)
        dists = np.sqrt(np.array([d for d, _ in found]))
        order = np.lexsort((ids, dists))[: min(k, ids.size)]
        return KnnResult(ids=ids[order], dists=dists[order], k=k)

    def level0_reachable(self) -> int:
        """Number of nodes reachable from the entry point on level 0."""
        adj = self.layers[0]
        seen = {self.entry_point}
        stack = [self.entry_point]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen)

    @property
    def n(self) -> int:
        return len(self.layers[0])

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        p = self.params
        out = [MAGIC, struct.pack("<H", FORMAT_VERSION)]
        out.append(
            struct.pack(
                "<IIIdqQIH",
                p.max_neighbors,
                p.ef_construction,
                p.ef_search,
                p.resolved_level_scale,
                p.seed,
                self.dataset_fingerprint,
                self.entry_point,
                len(self.layers),
            )
        )
        for adj in self.layers:
            out.append(struct.pack("<I", len(adj)))
            for node in sorted(adj):
                nbrs = adj[node]
                out.append(struct.pack("<IH", node, len(nbrs)))
                out.append(struct.pack(f"<{len(nbrs)}I", *nbrs))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "SmallWorldIndex":
        if blob[:4] != MAGIC:
            raise FormatError("not an index file: bad magic bytes")
        (version,) = struct.unpack_from("<H", blob, 4)
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported index format version {version}")
        off = 6
        try:
            m, efc, efs, scale, seed, fp, entry, n_levels = struct.unpack_from(
                "<IIIdqQIH", blob, off
            )
            off += struct.calcsize("<IIIdqQIH")
            layers = []
            for _ in range(n_levels):
                (count,) = struct.unpack_from("<I", blob, off)
                off += 4
                adj = {}
                for _ in range(count):
                    node, degree = struct.unpack_from("<IH", blob, off)
                    off += 6
                    nbrs = list(struct.unpack_from(f"<{degree}I", blob, off))
                    off += 4 * degree
                    adj[node] = nbrs
                layers.append(adj)
        except struct.error as exc:
            raise FormatError(f"truncated index file near byte {off}") from exc
        if off != len(blob):
            raise FormatError(f"trailing bytes after index data at byte {off}")
        params = IndexParams(
            max_neighbors=m, ef_construction=efc, ef_search=efs,
            level_scale=scale, seed=seed,
        )
        return cls(layers=layers, entry_point=entry, params=params,
                   dataset_fingerprint=fp)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path, data=None) -> "SmallWorldIndex":
        with open(path, "rb") as fh:
            index = cls.from_bytes(fh.read())
        if data is not None:
            index.attach(data)
        return index


def build_index(data, params: IndexParams | None = None) -> SmallWorldIndex:
    return SmallWorldIndex.build(data, params)


def ann_search(index: SmallWorldIndex, query, k: int, ef_search: int | None = None) -> KnnResult:
    return index.search(query, k, ef_search)


def recall_at_k(index: SmallWorldIndex, data, queries, k: int,
                ef_search: int | None = None) -> float:
    """Mean fraction of the exact top-k recovered by the approximate search."""
    from .knn import knn_search

    queries = np.atleast_2d(np.asarray(queries))
    if queries.shape[0] == 0:
        raise EmptyDatasetError("recall needs at least one query")
    total = 0.0
    for q in queries:
        approx = index.search(q, k, ef_search)
        exact = knn_search(data, q, k)
        total += len(np.intersect1d(approx.ids, exact.ids)) / k
    return total / queries.shape[0]
