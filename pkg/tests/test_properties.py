import math

from hypothesis import given, settings, strategies as st

from congest_mdst.graph import Graph, degrees, is_spanning_tree
from congest_mdst.mdst_log import matching_mdst
from congest_mdst.oracles import exact_mdst
from congest_mdst.runtime import SimConfig


@st.composite
def connected_graphs(draw, max_n=9):
    n = draw(st.integers(2, max_n))
    parents = [draw(st.integers(0, u - 1)) for u in range(1, n)]
    edges = {(p, u) for u, p in zip(range(1, n), parents)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n))
    return Graph.from_edges(n, edges | set(extra))


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2 ** 16))
def test_matching_mdst_is_spanning_and_within_log_factor(g, seed):
    r = matching_mdst(g, SimConfig(seed=seed))
    assert is_spanning_tree(g, r.tree)
    opt = exact_mdst(g).d
    k = max(degrees(r.tree, g.n))
    assert opt <= k <= max(opt, 2) * (math.ceil(math.log2(g.n)) + 1) + 1
