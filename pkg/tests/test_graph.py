import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multiwalk.graph import (GraphFormatError, connected_components, degree, diameter, dumps_edge_list,
                             from_edges, load_edge_list, load_labels)

edge_lists = st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=60)


def parse(text):
    return load_edge_list(io.StringIO(text))


def test_path_graph():
    g = parse("a b\nb c")
    assert (g.n_nodes, g.n_edges) == (3, 2)
    a, b = g.node_id("a"), g.node_id("b")
    assert g.neighbors(a).tolist() == [b]


def test_duplicates_and_self_loops_dropped():
    g = parse("a b\nb a\na a")
    assert (g.n_nodes, g.n_edges) == (2, 1)


def test_first_appearance_ids_and_extra_tokens():
    g = parse("# comment\nx y 0.5\n\nz x 3 4\n")
    assert g.node_names == ("x", "y", "z")
    assert g.n_edges == 2


def test_short_line_names_line_number():
    with pytest.raises(GraphFormatError, match="line 3"):
        parse("a b\n# c\nlonely\n")


def test_empty_input():
    with pytest.raises(GraphFormatError, match="empty graph"):
        parse("# nothing here\n")


def test_isolated_node_via_self_loop():
    g = parse("a b\nc c\n")
    assert g.n_nodes == 3
    assert degree(g, g.node_id("c")) == 0


def test_degree_examples():
    star = from_edges([("c", f"l{i}") for i in range(5)])
    assert degree(star, star.node_id("c")) == 5
    ring = from_edges([(i, (i + 1) % 7) for i in range(7)])
    assert all(degree(ring, v) == 2 for v in range(7))
    with pytest.raises(IndexError):
        degree(ring, 7)


@given(edge_lists)
def test_structural_invariants(edges):
    g = from_edges(edges)
    adj = g.adjacency
    total = 0
    for u, nb in enumerate(adj):
        assert np.all(np.diff(nb) > 0)
        assert u not in nb
        for v in nb:
            assert u in adj[v]
        total += len(nb)
    assert total == 2 * g.n_edges
    assert set(g.edges()) == {(min(u, v), max(u, v)) for u, v in
                              ((g.node_id(str(a)), g.node_id(str(b))) for a, b in edges) if u != v}


@given(edge_lists)
def test_round_trip(edges):
    g = from_edges(edges)
    h = parse(dumps_edge_list(g))
    assert h == g
    assert dumps_edge_list(h) == dumps_edge_list(g)


def test_round_trip_of_loaded_file():
    g = parse("c a\nb b\na d\n")
    assert parse(dumps_edge_list(g)) == g


def test_labels():
    g = parse("a b\n")
    lab = load_labels(io.StringIO("a 1\nb 2\n"), g)
    assert lab.n_classes == 2 and not lab.multi_label
    lab = load_labels(io.StringIO("a 1 3\nb 2\n"), g)
    assert lab.labels[g.node_id("a")] == frozenset({"1", "3"})
    assert lab.multi_label
    assert lab.indicator([g.node_id("a")]).tolist() == [[True, False, True]]


def test_labels_errors():
    g = parse("a b\n")
    with pytest.raises(GraphFormatError, match="'zz'"):
        load_labels(io.StringIO("zz 1\n"), g)
    with pytest.raises(GraphFormatError, match="twice|duplicate"):
        load_labels(io.StringIO("a 1\na 2\n"), g)


def test_labels_may_skip_nodes():
    g = parse("a b\nb c\n")
    lab = load_labels(io.StringIO("a x\n"), g)
    assert lab.nodes().tolist() == [g.node_id("a")]


def test_components_and_diameter():
    g = parse("a b\nb c\nx y\n")
    assert connected_components(g) == 2
    assert diameter(g) == 2
