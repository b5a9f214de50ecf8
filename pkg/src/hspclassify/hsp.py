"""Half-space proximal neighbor selection and graph-level checks.

The selection test is parameter-free: starting from all candidates it
repeatedly keeps the nearest remaining point and discards every candidate
that is strictly closer to the kept point than to the query.  Applying the
test at every node of a dataset yields a sparse directed proximity graph
whose undirected support empirically contains the Euclidean minimum
spanning tree and has bounded stretch; the checks for those properties
live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .dataset import as_matrix, check_query, sq_dists_to
from .errors import (
    ContractViolationError,
    DisconnectedGraphError,
    EmptyCandidatesError,
    EmptyDatasetError,
)


@dataclass(frozen=True)
class Neighborhood:
    """Selected neighbors in selection order: parallel (ids, dists) arrays.

    Distances are non-decreasing because each selection is the minimum over
    a shrinking candidate set.
    """

    ids: np.ndarray
    dists: np.ndarray

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


def hsp_neighbors(data, query, candidate_ids=None) -> Neighborhood:
    """Run the half-space proximal test for ``query`` over a candidate set.

    Repeatedly selects the candidate nearest to the query (ties broken by
    smaller id), then removes every remaining candidate strictly closer to
    the selected point than to the query.  Returns the selected neighbors in
    selection order.  The selected point itself is removed explicitly, so a
    candidate coinciding with the query cannot stall the loop.

    ``candidate_ids=None`` runs the test over the whole dataset.
    """
    mat = as_matrix(data)
    q = check_query(query, mat.shape[1])
    if candidate_ids is None:
        cand = np.arange(mat.shape[0], dtype=np.int64)
    else:
        cand = np.unique(np.asarray(candidate_ids, dtype=np.int64))
    if cand.size == 0:
        raise EmptyCandidatesError("half-space proximal test needs candidates")
    if cand[0] < 0 or cand[-1] >= mat.shape[0]:
        raise ContractViolationError("candidate id out of range")

    pts = mat[cand].astype(np.float64)
    dq = sq_dists_to(pts, q)

    alive = np.ones(cand.size, dtype=bool)
    picked: list[int] = []
    picked_sq: list[float] = []
    while True:
        alive_idx = np.flatnonzero(alive)
        if alive_idx.size == 0:
            break
        # candidates are sorted by id, so the first minimum is the tie winner
        sel = alive_idx[np.argmin(dq[alive_idx])]
        picked.append(sel)
        picked_sq.append(dq[sel])
        alive[sel] = False
        rest = alive_idx[alive_idx != sel]
        if rest.size == 0:
            break
        dv = sq_dists_to(pts[rest], pts[sel])
        alive[rest[dq[rest] > dv]] = False

    return Neighborhood(ids=cand[picked], dists=np.sqrt(np.asarray(picked_sq)))


@dataclass(frozen=True)
class HspGraph:
    """Directed proximity graph: one Neighborhood per node, in id order."""

    neighborhoods: tuple[Neighborhood, ...]

    @property
    def n(self) -> int:
        return len(self.neighborhoods)

    def out_degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.neighborhoods], dtype=np.int64)

    def undirected_edges(self) -> set[tuple[int, int]]:
        """Support of the graph with edge direction dropped."""
        edges: set[tuple[int, int]] = set()
        for u, nb in enumerate(self.neighborhoods):
            for v in nb.ids:
                edges.add((min(u, int(v)), max(u, int(v))))
        return edges

    def to_text(self) -> str:
        """One line per node: ``nodeId: id,id,...`` in selection order."""
        lines = []
        for u, nb in enumerate(self.neighborhoods):
            joined = ",".join(str(int(v)) for v in nb.ids)
            lines.append(f"{u}: {joined}" if joined else f"{u}:")
        return "\n".join(lines) + "\n"


def build_hsp_graph(data) -> HspGraph:
    """Apply the half-space proximal test at every node over all others."""
    mat = as_matrix(data)
    n = mat.shape[0]
    if n == 0:
        raise EmptyDatasetError("cannot build a graph over an empty dataset")
    all_ids = np.arange(n, dtype=np.int64)
    empty = Neighborhood(ids=np.empty(0, np.int64), dists=np.empty(0))
    neighborhoods = []
    for u in range(n):
        if n == 1:
            neighborhoods.append(empty)
            continue
        cand = all_ids[all_ids != u]
        neighborhoods.append(hsp_neighbors(mat, mat[u], cand))
    return HspGraph(neighborhoods=tuple(neighborhoods))


def out_degree_stats(graph: HspGraph) -> tuple[int, int, float]:
    """(min, max, mean) out-degree of a non-empty graph."""
    if graph.n == 0:
        raise EmptyDatasetError("graph has no nodes")
    degs = graph.out_degrees()
    return int(degs.min()), int(degs.max()), float(degs.mean())


def euclidean_mst(data) -> list[tuple[int, int]]:
    """Edges of the Euclidean minimum spanning tree via Prim's algorithm.

    Works on squared distances (the tree is the same) and scans rows, so it
    is independent of the proximity-graph machinery above.
    """
    mat = as_matrix(data).astype(np.float64)
    n = mat.shape[0]
    if n == 0:
        raise EmptyDatasetError("cannot span an empty dataset")
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best_from = np.full(n, -1, dtype=np.int64)
    in_tree[0] = True
    best_edge = sq_dists_to(mat, mat[0])
    best = np.where(in_tree, np.inf, best_edge)
    best_from[:] = 0
    edges: list[tuple[int, int]] = []
    for _ in range(n - 1):
        v = int(np.argmin(best))
        u = int(best_from[v])
        edges.append((min(u, v), max(u, v)))
        in_tree[v] = True
        best[v] = np.inf
        dv = sq_dists_to(mat, mat[v])
        closer = ~in_tree & (dv < best)
        best[closer] = dv[closer]
        best_from[closer] = v
    return edges


def verify_mst_containment(graph: HspGraph, data) -> tuple[bool, list[tuple[int, int]]]:
    """Check that every MST edge appears in the graph's undirected support."""
    support = graph.undirected_edges()
    missing = [e for e in euclidean_mst(data) if e not in support]
    return (len(missing) == 0, missing)


def empirical_stretch(graph: HspGraph, data) -> float:
    """Worst ratio of graph shortest-path length to direct distance.

    Edge weights are the Euclidean lengths over the undirected support.
    Raises DisconnectedGraphError naming an unreachable pair; pairs of
    coincident points (direct distance zero) are skipped.
    """
    mat = as_matrix(data).astype(np.float64)
    n = graph.n
    if n < 2:
        return 1.0
    rows, cols, weights = [], [], []
    for u, v in graph.undirected_edges():
        w = float(np.sqrt(sq_dists_to(mat[v][None, :], mat[u])[0]))
        rows.append(u)
        cols.append(v)
        weights.append(w)
    adj = csr_matrix((weights, (rows, cols)), shape=(n, n))
    sp = shortest_path(adj, method="D", directed=False)
    worst = 1.0
    for u in range(n):
        d_row = np.sqrt(sq_dists_to(mat, mat[u]))
        for v in range(u + 1, n):
            if not np.isfinite(sp[u, v]):
                raise DisconnectedGraphError(u, v)
            if d_row[v] == 0.0:
                continue
            ratio = sp[u, v] / d_row[v]
            if ratio > worst:
                worst = ratio
    return float(worst)


def check_neighborhood(data, query, candidate_ids, nb: Neighborhood) -> None:
    """Re-check the selection invariants for one produced Neighborhood.

    Raises ContractViolationError on the first violated predicate; used by
    the verification CLI and the test suite.
    """
    mat = as_matrix(data)
    q = check_query(query, mat.shape[1])
    cand = np.unique(np.asarray(candidate_ids, dtype=np.int64))
    if cand.size and len(nb) == 0:
        raise ContractViolationError("empty neighborhood for non-empty candidates")
    if len(np.unique(nb.ids)) != len(nb):
        raise ContractViolationError("repeated neighbor id")
    if np.any(np.diff(nb.dists) < 0):
        raise ContractViolationError("distances not non-decreasing")

    sel_pts = mat[nb.ids].astype(np.float64)
    dq_sel = sq_dists_to(sel_pts, q)
    # survivor pair property: a later pick is no closer to an earlier pick
    # than it is to the query
    for j in range(1, len(nb)):
        d_prev = sq_dists_to(sel_pts[:j], sel_pts[j])
        if np.any(d_prev < dq_sel[j]):
            raise ContractViolationError(
                f"survivor predicate violated for neighbor {int(nb.ids[j])}"
            )
    # elimination soundness: every dropped candidate has a selected witness
    dropped = np.setdiff1d(cand, nb.ids, assume_unique=True)
    if dropped.size:
        dpts = mat[dropped].astype(np.float64)
        dq_drop = sq_dists_to(dpts, q)
        for i, c in enumerate(dropped):
            d_to_sel = sq_dists_to(sel_pts, dpts[i])
            if not np.any(d_to_sel < dq_drop[i]):
                raise ContractViolationError(
                    f"candidate {int(c)} was dropped without a witness"
                )
