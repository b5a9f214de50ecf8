"""Half-space proximal test and the derived proximity graph."""

import numpy as np
import pytest

from hspclassify import (
    ContractViolationError,
    DisconnectedGraphError,
    EmptyCandidatesError,
    HspGraph,
    Neighborhood,
    build_hsp_graph,
    check_neighborhood,
    empirical_stretch,
    euclidean_mst,
    hsp_neighbors,
    knn_search,
    out_degree_stats,
    verify_mst_containment,
)
from hspclassify import LabeledDataset

from oracles import halfplane_hsp, prim_mst_scipy


class TestSelection:
    def test_collinear_shadowing(self):
        # the nearer collinear point eliminates the farther one
        pts = np.array([[1.0, 0.0], [2.0, 0.0]], dtype=np.float32)
        nb = hsp_neighbors(pts, (0.0, 0.0))
        assert list(nb.ids) == [0]

    def test_tie_broken_by_smaller_id_and_survivor_kept(self):
        pts = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=np.float32)
        nb = hsp_neighbors(pts, (0.0, 0.0))
        assert list(nb.ids) == [0, 1]
        assert nb.dists[0] == nb.dists[1] == 1.0

    def test_coincident_candidate_selected_first_eliminates_nothing(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]], dtype=np.float32)
        nb = hsp_neighbors(pts, (0.0, 0.0))
        assert list(nb.ids)[0] == 0 and nb.dists[0] == 0.0
        # remaining points keep their usual mutual elimination behavior
        assert set(nb.ids) == {0, 1, 2}

    def test_empty_candidates_error(self):
        pts = np.ones((3, 2), dtype=np.float32)
        with pytest.raises(EmptyCandidatesError):
            hsp_neighbors(pts, (0.0, 0.0), [])

    def test_out_of_range_candidate(self):
        pts = np.ones((3, 2), dtype=np.float32)
        with pytest.raises(ContractViolationError):
            hsp_neighbors(pts, (0.0, 0.0), [0, 5])

    def test_matches_halfplane_oracle_unit_square(self):
        rng = np.random.default_rng(8)
        pts = rng.random((50, 2)).astype(np.float32)
        for _ in range(20):
            q = rng.random(2)
            nb = hsp_neighbors(pts, q)
            assert list(nb.ids) == halfplane_hsp(pts, q)

    def test_first_entry_is_exact_nearest_neighbor(self, tiny_points):
        rng = np.random.default_rng(4)
        data = LabeledDataset(tiny_points, np.zeros(len(tiny_points), dtype=int))
        for _ in range(25):
            q = rng.random(2)
            nb = hsp_neighbors(data, q)
            nn = knn_search(data, q, 1)
            assert nb.ids[0] == nn.ids[0]
            assert nb.dists[0] == nn.dists[0]

    def test_distances_non_decreasing_and_ids_distinct(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((120, 6)).astype(np.float32)
        for _ in range(10):
            nb = hsp_neighbors(pts, rng.standard_normal(6))
            assert np.all(np.diff(nb.dists) >= 0)
            assert len(set(nb.ids.tolist())) == len(nb.ids)

    def test_similarity_transform_leaves_id_sequence_unchanged(self):
        rng = np.random.default_rng(6)
        pts = rng.random((40, 3))
        q = rng.random(3)
        base = hsp_neighbors(pts.astype(np.float32), q)
        scaled = (pts * 3.5 + np.array([10.0, -2.0, 0.25])).astype(np.float32)
        moved = hsp_neighbors(scaled, q * 3.5 + np.array([10.0, -2.0, 0.25]))
        assert list(base.ids) == list(moved.ids)

    def test_survivor_and_elimination_predicates(self):
        rng = np.random.default_rng(7)
        pts = rng.random((200, 2)).astype(np.float32)
        for _ in range(5):
            q = rng.random(2)
            nb = hsp_neighbors(pts, q)
            check_neighborhood(pts, q, np.arange(200), nb)


class TestCheckNeighborhood:
    def test_detects_planted_violation(self, tiny_points):
        q = np.array([0.2, 0.2])
        nb = hsp_neighbors(tiny_points, q)
        # planting an eliminated candidate back into the result must trip
        # either the survivor or the ordering predicate
        dropped = [i for i in range(len(tiny_points)) if i not in nb.ids]
        bad = Neighborhood(
            ids=np.append(nb.ids, dropped[0]),
            dists=np.append(nb.dists, nb.dists[-1] + 1.0),
        )
        with pytest.raises(ContractViolationError):
            check_neighborhood(tiny_points, q, np.arange(len(tiny_points)), bad)

    def test_detects_unsorted_distances(self):
        # orthogonal directions: neither point shadows the other, so both
        # survive with strictly increasing distances
        pts = np.array([[1.0, 0.0], [0.0, 3.0]], dtype=np.float32)
        q = np.zeros(2)
        nb = hsp_neighbors(pts, q)
        assert list(nb.ids) == [0, 1]
        bad = Neighborhood(ids=nb.ids[::-1].copy(), dists=nb.dists[::-1].copy())
        with pytest.raises(ContractViolationError):
            check_neighborhood(pts, q, np.arange(2), bad)


class TestGraph:
    def test_two_points_are_mutual(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]], dtype=np.float32)
        g = build_hsp_graph(pts)
        assert list(g.neighborhoods[0].ids) == [1]
        assert list(g.neighborhoods[1].ids) == [0]
        assert out_degree_stats(g) == (1, 1, 1.0)

    def test_singleton_graph_has_empty_adjacency(self):
        g = build_hsp_graph(np.zeros((1, 2), dtype=np.float32))
        assert g.n == 1 and len(g.neighborhoods[0]) == 0

    def test_triangle_matches_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            pts = rng.random((3, 2)).astype(np.float32)
            g = build_hsp_graph(pts)
            for u in range(3):
                want = halfplane_hsp(pts, pts[u], [c for c in range(3) if c != u])
                assert list(g.neighborhoods[u].ids) == want

    def test_no_self_loops_and_text_export(self, tiny_points):
        g = build_hsp_graph(tiny_points)
        text = g.to_text()
        lines = text.splitlines()
        assert len(lines) == g.n and text.endswith("\n")
        for u, line in enumerate(lines):
            head, _, rest = line.partition(":")
            assert int(head) == u
            ids = [int(t) for t in rest.strip().split(",")] if rest.strip() else []
            assert ids == [int(v) for v in g.neighborhoods[u].ids]
            assert u not in ids

    def test_undirected_edges_are_canonical_pairs(self, tiny_points):
        g = build_hsp_graph(tiny_points)
        for u, v in g.undirected_edges():
            assert u < v


class TestMst:
    def test_two_points(self):
        pts = np.array([[0.0, 0.0], [2.0, 0.0]], dtype=np.float32)
        ok, missing = verify_mst_containment(build_hsp_graph(pts), pts)
        assert ok and missing == []

    def test_prim_matches_scipy(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            pts = rng.random((40, 3)).astype(np.float32)
            assert set(euclidean_mst(pts)) == prim_mst_scipy(pts)

    @pytest.mark.parametrize("dim", [2, 16])
    def test_containment_random(self, dim):
        rng = np.random.default_rng(12)
        for _ in range(5):
            pts = rng.standard_normal((64, dim)).astype(np.float32)
            ok, missing = verify_mst_containment(build_hsp_graph(pts), pts)
            assert ok, missing


class TestStretch:
    def test_two_points(self):
        pts = np.array([[0.0, 0.0], [1.0, 3.0]], dtype=np.float32)
        assert empirical_stretch(build_hsp_graph(pts), pts) == 1.0

    def test_collinear_chain(self):
        pts = np.array([[float(i), 0.0] for i in range(6)], dtype=np.float32)
        g = build_hsp_graph(pts)
        assert empirical_stretch(g, pts) == pytest.approx(1.0)

    def test_disconnected_support_names_a_pair(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.float32)
        empty = Neighborhood(ids=np.empty(0, np.int64), dists=np.empty(0))
        isolated = HspGraph(neighborhoods=(empty, empty))
        with pytest.raises(DisconnectedGraphError) as exc:
            empirical_stretch(isolated, pts)
        assert {exc.value.source, exc.value.target} == {0, 1}
