import networkx as nx
import pytest

from congest_mdst.components import ComponentView, Components, ceil_sqrt
from congest_mdst.graph import Graph, components_of


def to_nx(g: Graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return G


def components_from_forest(g: Graph, forest) -> Components:
    """Views for the components of ``forest``: leader = smallest member."""
    part = components_of(g, forest)
    S = ceil_sqrt(g.n)
    views = [None] * g.n
    for members in part.members.values():
        lead = min(members)
        for u in members:
            views[u] = ComponentView(lead, lead, len(members), len(members) >= S)
    fadj = [set() for _ in range(g.n)]
    for u, v in forest:
        fadj[u].add(v)
        fadj[v].add(u)
    return Components(views, fadj, tuple(sorted({v.leader_id for v in views if v.is_large})))


@pytest.fixture
def nxg():
    return to_nx
