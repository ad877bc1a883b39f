import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algconn.graph import (
    EdgeSelection,
    SelectionMismatchError,
    WeightedGraph,
    complete_graph,
    connected_components,
    cutset,
    edge_laplacian,
    enumerate_spanning_trees,
    is_spanning_tree,
    random_spanning_tree,
    weighted_laplacian,
)


def all_ones(g):
    return EdgeSelection(g, (1,) * g.edge_count)


class TestWeightedGraph:
    def test_canonical_edge_order(self):
        g = WeightedGraph(3, ((2, 3, 1.0), (1, 3, 2.0), (2, 1, 3.0)))
        assert g.edges == ((1, 2, 3.0), (1, 3, 2.0), (2, 3, 1.0))

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            WeightedGraph(3, ((1, 1, 1.0),))

    def test_rejects_duplicate(self):
        with pytest.raises(ValueError, match="duplicate"):
            WeightedGraph(3, ((1, 2, 1.0), (2, 1, 2.0)))

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError, match="non-positive"):
            WeightedGraph(3, ((1, 2, 0.0),))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            WeightedGraph(3, ((1, 4, 1.0),))

    def test_adjacency_roundtrip(self):
        g = complete_graph(4, {(i, j): i + j for i in range(1, 4) for j in range(i + 1, 5)})
        W = g.adjacency()
        assert W[0, 1] == 3 and W[2, 3] == 7 and np.allclose(W, W.T)


class TestEdgeLaplacian:
    def test_two_nodes(self):
        assert np.array_equal(edge_laplacian(2, 1, 2, 1.0), [[1, -1], [-1, 1]])

    def test_three_nodes(self):
        L = edge_laplacian(3, 1, 2, 2.0)
        assert np.array_equal(L, [[2, -2, 0], [-2, 2, 0], [0, 0, 0]])

    def test_row_sums_zero(self):
        L = edge_laplacian(5, 2, 4, 3.7)
        assert np.allclose(L.sum(axis=1), 0.0)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            edge_laplacian(3, 2, 2, 1.0)
        with pytest.raises(ValueError):
            edge_laplacian(3, 1, 2, -1.0)


class TestWeightedLaplacian:
    def test_unit_k3_all(self):
        g = complete_graph(3)
        L = weighted_laplacian(g, all_ones(g))
        assert np.array_equal(L, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])

    def test_unit_k3_path(self):
        g = complete_graph(3)
        x = EdgeSelection.from_edges(g, [(1, 2), (2, 3)])
        assert np.array_equal(
            weighted_laplacian(g, x), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
        )

    def test_empty_selection(self):
        g = complete_graph(3)
        x = EdgeSelection(g, (0, 0, 0))
        assert np.array_equal(weighted_laplacian(g, x), np.zeros((3, 3)))

    def test_length_mismatch(self):
        g = complete_graph(3)
        with pytest.raises(SelectionMismatchError):
            EdgeSelection(g, (1, 0))

    def test_wrong_graph(self):
        g, h = complete_graph(3), complete_graph(3, {(1, 2): 2, (1, 3): 1, (2, 3): 1})
        x = all_ones(g)
        with pytest.raises(SelectionMismatchError):
            weighted_laplacian(h, x)

    @given(st.integers(2, 6), st.integers(0, 2**15 - 1), st.integers(0, 10_000))
    def test_laplacian_invariants(self, n, mask_seed, wseed):
        rng = np.random.default_rng(wseed)
        g = complete_graph(
            n, {(i, j): float(rng.uniform(0.5, 5)) for i in range(1, n) for j in range(i + 1, n + 1)}
        )
        bits = tuple((mask_seed >> k) & 1 for k in range(g.edge_count))
        L = weighted_laplacian(g, EdgeSelection(g, bits))
        assert np.allclose(L, L.T)
        assert np.abs(L.sum(axis=1)).max() < 1e-10
        assert np.linalg.eigvalsh(L).min() >= -1e-10


class TestSpanningTree:
    def test_star_is_tree(self):
        g = complete_graph(4)
        assert is_spanning_tree(g, EdgeSelection.from_edges(g, [(1, 2), (1, 3), (1, 4)]))

    def test_triangle_is_not(self):
        g = complete_graph(4)
        assert not is_spanning_tree(
            g, EdgeSelection.from_edges(g, [(1, 2), (1, 3), (2, 3)])
        )

    def test_two_edges_is_not(self):
        g = complete_graph(4)
        assert not is_spanning_tree(g, EdgeSelection.from_edges(g, [(1, 2), (3, 4)]))

    def test_components_matching(self):
        g = complete_graph(4)
        x = EdgeSelection.from_edges(g, [(1, 2), (3, 4)])
        assert connected_components(g, x) == [frozenset({1, 2}), frozenset({3, 4})]

    def test_components_empty(self):
        g = complete_graph(3)
        comps = connected_components(g, EdgeSelection(g, (0, 0, 0)))
        assert comps == [frozenset({1}), frozenset({2}), frozenset({3})]

    @given(st.integers(2, 6), st.integers(0, 2**15 - 1))
    def test_tree_iff_count_and_connected(self, n, mask_seed):
        g = complete_graph(n)
        bits = tuple((mask_seed >> k) & 1 for k in range(g.edge_count))
        x = EdgeSelection(g, bits)
        expected = x.count == n - 1 and len(connected_components(g, x)) == 1
        assert is_spanning_tree(g, x) == expected


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(3, 3), (4, 16), (5, 125)])
    def test_cayley_counts(self, n, count):
        g = complete_graph(n)
        trees = list(enumerate_spanning_trees(g))
        assert len(trees) == count
        assert len({t.bits for t in trees}) == count
        assert all(is_spanning_tree(g, t) for t in trees)

    def test_non_complete_enumeration(self):
        # square with one diagonal: 4 nodes, edges of C4 plus (1,3)
        g = WeightedGraph(
            4, ((1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (1, 4, 1.0), (1, 3, 1.0))
        )
        trees = list(enumerate_spanning_trees(g))
        brute = 0
        for subset in itertools.combinations(range(g.edge_count), 3):
            bits = [0] * g.edge_count
            for p in subset:
                bits[p] = 1
            brute += is_spanning_tree(g, EdgeSelection(g, tuple(bits)))
        assert len(trees) == brute > 0

    def test_refuses_large(self):
        with pytest.raises(ValueError, match="refusing"):
            next(enumerate_spanning_trees(complete_graph(10)))

    def test_random_tree_is_tree(self, rng):
        g = complete_graph(7)
        for _ in range(25):
            assert is_spanning_tree(g, random_spanning_tree(g, rng))


class TestCutset:
    def test_basic(self):
        g = complete_graph(4)
        c = cutset(g, {1, 2})
        assert c.cut_edges == ((1, 3), (1, 4), (2, 3), (2, 4))

    def test_rejects_full_set(self):
        with pytest.raises(ValueError):
            cutset(complete_graph(3), {1, 2, 3})
