import random

import networkx as nx
import pytest

from congest_mdst.graph import (
    DisconnectedGraphError,
    GENERATORS,
    Graph,
    GraphError,
    UnionFind,
    components_of,
    diameter,
    generate,
    is_spanning_tree,
    max_degree,
    read_graph,
    write_graph,
)

from conftest import to_nx


def test_path_edges():
    g = generate("path", 4)
    assert g.edges == {(0, 1), (1, 2), (2, 3)}
    assert g.adj == ((1,), (0, 2), (1, 3), (2,))


def test_star_degrees():
    g = generate("star", 5)
    assert g.degree(0) == 4
    assert all(g.degree(u) == 1 for u in range(1, 5))


def test_random_connected_example():
    g = generate("random-connected", 20, {"p": 0.2}, seed=7)
    assert nx.is_connected(to_nx(g))
    assert g.n == 20


@pytest.mark.parametrize("kind", sorted(GENERATORS))
@pytest.mark.parametrize("n", [4, 7, 30])
def test_generators_connected_simple(kind, n):
    g = generate(kind, n, {}, seed=3)
    G = to_nx(g)
    assert g.n == n and G.number_of_nodes() == n
    assert nx.is_connected(G)
    assert all(u < v for u, v in g.edges)
    for u in range(n):
        for v in g.adj[u]:
            assert u in g.adj[v]


@pytest.mark.parametrize("kind", ["path", "cycle", "star", "complete", "grid", "random-connected", "wheel"])
def test_generators_single_node(kind):
    g = generate(kind, 1)
    assert g.n == 1 and not g.edges


@pytest.mark.parametrize("kind", ["random-connected", "random-tree-plus-chords", "grid"])
def test_generators_deterministic(kind):
    assert generate(kind, 40, {}, 5) == generate(kind, 40, {}, 5)


def test_generator_errors():
    with pytest.raises(GraphError):
        generate("hypercube", 8)
    with pytest.raises(GraphError):
        generate("path", 0)
    with pytest.raises(GraphError):
        generate("random-connected", 10, {"p": 1.5})


def test_from_edges_rejects_bad_input():
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 3)])


@pytest.mark.parametrize("kind,n,expected", [("path", 4, 3), ("complete", 5, 1), ("grid", 16, 6)])
def test_diameter_examples(kind, n, expected):
    assert diameter(generate(kind, n)) == expected


@pytest.mark.parametrize("kind,n,params", [("random-connected", 60, {"p": 0.05}), ("complete", 40, {}),
                                           ("barbell", 30, {}), ("random-connected", 50, {"p": 0.5})])
def test_diameter_matches_networkx(kind, n, params):
    g = generate(kind, n, params, 1)
    assert diameter(g) == nx.diameter(to_nx(g))


@pytest.mark.parametrize("n", [2, 5, 17])
def test_path_diameter(n):
    assert diameter(generate("path", n)) == n - 1


def test_diameter_disconnected():
    with pytest.raises(DisconnectedGraphError):
        diameter(Graph.from_edges(3, [(0, 1)]))


def test_is_spanning_tree_examples():
    g = generate("path", 4)
    assert is_spanning_tree(g, {(0, 1), (1, 2), (2, 3)})
    assert not is_spanning_tree(g, {(0, 1), (1, 2)})


def test_max_degree_examples():
    assert max_degree(generate("star", 5).edges) == 4
    assert max_degree(set()) == 0
    assert max_degree({(i, i + 1) for i in range(7)}) == 2


def test_components_of_examples():
    g = generate("path", 5)
    assert len(components_of(g, set())) == 5
    p = components_of(generate("path", 4), {(0, 1), (1, 2)})
    assert sorted(p.blocks()) == [(0, 1, 2), (3,)]


def test_components_of_rejects_foreign_edge():
    with pytest.raises(GraphError):
        components_of(generate("path", 4), {(0, 3)})


def test_components_match_union_find_on_random_subsets():
    rng = random.Random(11)
    g = generate("random-connected", 40, {"p": 0.15}, 2)
    for _ in range(20):
        es = {e for e in g.edges if rng.random() < 0.3}
        uf = UnionFind(g.n)
        count = g.n - sum(uf.union(*e) for e in es)
        assert len(components_of(g, es)) == count
        G = nx.Graph()
        G.add_nodes_from(range(g.n))
        G.add_edges_from(es)
        assert count == nx.number_connected_components(G)


def test_spanning_tree_iff_one_component():
    rng = random.Random(4)
    g = generate("random-connected", 15, {"p": 0.3}, 0)
    edges = sorted(g.edges)
    for _ in range(200):
        t = set(rng.sample(edges, 14))
        assert is_spanning_tree(g, t) == (len(components_of(g, t)) == 1)


def test_file_roundtrip(tmp_path):
    g = generate("random-connected", 25, {}, 9)
    p = tmp_path / "g.txt"
    write_graph(g, p)
    assert read_graph(p) == g


def test_reader_rejects_duplicates(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 2\n0 1\n1 0\n")
    with pytest.raises(GraphError):
        read_graph(p)
    p.write_text("3 1\n1 1\n")
    with pytest.raises(GraphError):
        read_graph(p)
