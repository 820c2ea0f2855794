import io
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beliefflow.errors import EmptyGraphError, ParseError
from beliefflow.graph import (Graph, adjusted_adjacency, clustering_coefficients, format_edge_list,
                              parse_edge_list, read_edge_list, snowball_sample, write_edge_list)
from oracles import clustering_triple_loop, graphs


class TestParse:
    def test_comment_and_two_edges(self):
        g = parse_edge_list("# c\n0 1\n1 2")
        assert g.n == 3
        assert g.edges.tolist() == [[0, 1], [1, 2]]

    def test_undirected_duplicate_collapses(self):
        g = parse_edge_list("0 1\n1 0")
        assert g.n == 2 and g.n_edges == 1

    def test_self_loop_dropped_and_counted(self):
        with pytest.warns(UserWarning):
            g = parse_edge_list("0 0\n0 1")
        assert g.n == 2 and g.n_edges == 1
        assert g.skipped_self_loops == 1

    def test_non_integer_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list("0 1\na b\n")

    def test_empty_input(self):
        with pytest.raises(EmptyGraphError):
            parse_edge_list("# nothing\n\n")

    def test_only_self_loops_is_empty(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with pytest.raises(EmptyGraphError):
                parse_edge_list("3 3\n")

    def test_sparse_ids_are_remapped_in_order(self):
        g = parse_edge_list("10 30\n30 20\n")
        assert g.n == 3
        assert g.ids.tolist() == [10, 20, 30]
        assert g.edges.tolist() == [[0, 2], [1, 2]]

    def test_stream_and_file(self, tmp_path):
        g = parse_edge_list(io.StringIO("0 1\n1 2\n"))
        p = tmp_path / "g.txt"
        write_edge_list(g, p)
        assert read_edge_list(p) == g

    def test_tab_separated_with_extra_columns(self):
        g = parse_edge_list("0\t1\t0.5\n1\t2\t0.7\n")
        assert g.n_edges == 2

    @given(graphs(min_n=2, max_n=25))
    def test_roundtrip(self, g):
        if g.n_edges == 0:
            return
        # isolated nodes are invisible in an edge list, so compare on the touched nodes
        h = parse_edge_list(format_edge_list(g))
        touched = np.unique(g.edges)
        assert h.n == len(touched)
        remap = {int(v): k for k, v in enumerate(touched)}
        expect = sorted((remap[int(u)], remap[int(v)]) for u, v in g.edges)
        assert [tuple(e) for e in h.edges.tolist()] == expect

    def test_roundtrip_keeps_original_ids(self):
        g = parse_edge_list("5 9\n9 7\n")
        h = parse_edge_list(format_edge_list(g, use_ids=True))
        assert h.ids.tolist() == g.ids.tolist()
        assert h == g


class TestClustering:
    def test_triangle(self, triangle):
        assert clustering_coefficients(triangle).tolist() == [1.0, 1.0, 1.0]

    def test_path(self, path3):
        assert clustering_coefficients(path3).tolist() == [0.0, 0.0, 0.0]

    def test_k4_minus_edge(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        gam = clustering_coefficients(g)
        assert gam[0] == pytest.approx(2 / 3) and gam[1] == pytest.approx(2 / 3)
        assert gam[2] == 1.0 and gam[3] == 1.0

    def test_low_degree_is_zero(self):
        g = Graph.from_edges(3, [(0, 1)])
        assert clustering_coefficients(g).tolist() == [0.0, 0.0, 0.0]

    @given(graphs(max_n=18))
    def test_matches_triple_loop(self, g):
        expect = clustering_triple_loop(g.n, g.edges.tolist())
        np.testing.assert_allclose(g.clustering, expect, atol=1e-12)

    def test_matches_triple_loop_n50(self, rng):
        from oracles import random_graph
        for p in (0.05, 0.2, 0.6):
            g = random_graph(rng, 50, p)
            np.testing.assert_allclose(g.clustering, clustering_triple_loop(g.n, g.edges.tolist()),
                                       atol=1e-12)

    @given(graphs(max_n=20))
    def test_range(self, g):
        assert np.all((g.clustering >= 0) & (g.clustering <= 1))


class TestAdjusted:
    def test_triangle(self, triangle):
        a = adjusted_adjacency(triangle, sparse=False)
        off = ~np.eye(3, dtype=bool)
        np.testing.assert_allclose(a[off], 1 / 3)
        assert np.all(np.diag(a) == 0)

    def test_path(self, path3):
        a = adjusted_adjacency(path3, sparse=False)
        assert a[0, 1] == pytest.approx(1 / 3)
        assert a[1, 0] == pytest.approx(1 / 2)

    def test_isolated_node(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2)])
        a = adjusted_adjacency(g, sparse=False)
        assert not a[3].any() and not a[:, 3].any()

    def test_sparse_equals_dense(self, rng):
        from oracles import random_graph
        g = random_graph(rng, 40, 0.1)
        np.testing.assert_allclose(adjusted_adjacency(g, sparse=True).toarray(),
                                   adjusted_adjacency(g, sparse=False))

    @given(graphs(max_n=25))
    def test_column_sums_contract(self, g):
        a = adjusted_adjacency(g, sparse=False)
        d = g.degrees
        np.testing.assert_allclose(a.sum(axis=0), d / (1.0 + d), atol=1e-12)
        assert np.all(a.sum(axis=0) < 1)


class TestSnowball:
    def test_saturation(self, rng):
        from oracles import random_graph
        g = random_graph(rng, 30, 0.1)
        s = snowball_sample(g, 100, seed=1)
        assert s == g

    def test_deterministic(self, rng):
        from oracles import random_graph
        g = random_graph(rng, 60, 0.08)
        a = snowball_sample(g, 20, seed=5)
        b = snowball_sample(g, 20, seed=5)
        assert a.ids.tolist() == b.ids.tolist() and a == b

    def test_star_from_center(self):
        star = Graph.from_edges(6, [(0, k) for k in range(1, 6)])
        for seed in range(200):
            s = snowball_sample(star, 3, seed)
            # BFS from the center, or from a leaf that reaches it next, keeps the center
            assert 0 in s.ids.tolist()
            assert s.n == 3 and s.n_edges == 2

    @given(graphs(min_n=1, max_n=25), st.integers(1, 30), st.integers(0, 2**32 - 1))
    def test_induced_subgraph(self, g, size, seed):
        s = snowball_sample(g, size, seed)
        assert s.n == min(size, g.n)
        parent = s.ids
        assert len(set(parent.tolist())) == s.n
        sub_edges = {(int(parent[u]), int(parent[v])) for u, v in s.edges}
        chosen = set(parent.tolist())
        expect = {(int(u), int(v)) for u, v in g.edges if u in chosen and v in chosen}
        assert sub_edges == expect


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(0, 2)])

    def test_edges_read_only(self, triangle):
        with pytest.raises(ValueError):
            triangle.edges[0, 0] = 5

    def test_networkx_agrees(self, rng):
        import networkx as nx
        from oracles import random_graph
        g = random_graph(rng, 40, 0.15)
        cc = nx.clustering(g.to_networkx())
        np.testing.assert_allclose(g.clustering, [cc[i] for i in range(g.n)], atol=1e-12)
