import pytest

from congest_mdst.components import Network, bfs_reference
from congest_mdst.graph import Graph, generate
from congest_mdst.matchings import (
    ConstrainedInstance,
    component_matching,
    d_cm,
    decode_edge,
    edge_code,
    iterations,
    verify_component_matching,
    verify_constrained,
    verify_matching,
    verify_one_d,
)
from congest_mdst.oracles import max_matching_oracle
from congest_mdst.runtime import SimConfig

from conftest import components_from_forest


def test_edge_code_roundtrip():
    for u, v in [(0, 1), (5, 2), (9, 8)]:
        assert decode_edge(10, edge_code(10, u, v)) == (min(u, v), max(u, v))


def test_iterations_count():
    assert iterations(1024) == 80
    assert iterations(2, c=3) == 3


@pytest.mark.parametrize("kind,n", [("path", 10), ("complete", 12), ("grid", 25), ("random-connected", 60),
                                    ("star", 9), ("barbell", 20)])
@pytest.mark.parametrize("seed", range(3))
def test_component_matching_valid_and_maximal(kind, n, seed):
    g = generate(kind, n, {}, seed)
    net = Network(g, SimConfig(seed=seed))
    cm = component_matching(net)
    chk = verify_component_matching(g, list(range(n)), cm.edges)
    assert chk.valid and chk.maximal, chk.reason
    # a maximal matching is at least half a maximum one
    assert 2 * len(cm.edges) >= max_matching_oracle("component", g, label=list(range(n)))


def test_component_matching_on_components():
    g = generate("random-connected", 40, {"p": 0.1}, 1)
    parent = bfs_reference(g).parent
    forest = {(min(u, p), max(u, p)) for u, p in enumerate(parent) if p >= 0 and u % 3}
    comps = components_from_forest(g, forest)
    for backend in ("fast", "engine"):
        net = Network(g, SimConfig(seed=2), backend)
        cm = component_matching(net, comps)
        lab = [comps.leader(u) for u in range(g.n)]
        chk = verify_component_matching(g, lab, cm.edges)
        assert chk.valid and chk.maximal


def test_component_matching_engine_equals_fast():
    g = generate("random-connected", 30, {}, 4)
    outs = []
    for backend in ("fast", "engine"):
        net = Network(g, SimConfig(seed=7), backend)
        cm = component_matching(net)
        outs.append((sorted(cm.edges), net.metrics.rounds_executed))
    assert outs[0] == outs[1]


def test_two_adjacent_singletons():
    g = generate("path", 2)
    assert max_matching_oracle("component", g, label=[0, 1]) == 1
    cm = component_matching(Network(g, SimConfig()))
    assert cm.edges == {(0, 1)}


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("seed", range(3))
def test_d_cm_valid_and_maximal(d, seed):
    g = generate("random-connected", 50, {"p": 0.08}, seed)
    net = Network(g, SimConfig(seed=seed))
    cm = component_matching(net)
    touched = {x for e in cm.edges for x in e}
    U = set(range(g.n)) - touched
    Q = {v for v in touched if any(w in U for w in g.adj[v])}
    res = d_cm(net, U, Q, d)
    lab = list(range(g.n))
    chk = verify_one_d(g, lab, U, Q, d, res.edges)
    assert chk.valid and chk.maximal, chk.reason
    best = max_matching_oracle("one_d", g, label=lab, U=U, Q=Q, d=d)
    assert 2 * len(res.edges) >= best


def test_d_cm_star_capacity():
    # leaves are singletons in U, the centre is the only Q node
    g = generate("star", 8)
    net = Network(g, SimConfig())
    res = d_cm(net, set(range(1, 8)), {0}, 3)
    assert len(res.edges) == 3
    assert {q for _, q in res.edges} == {0}


def test_verify_component_matching_rejections():
    g = generate("path", 4)
    lab = [0, 0, 2, 3]
    assert not verify_component_matching(g, lab, [(0, 1)]).valid
    assert not verify_component_matching(g, lab, [(1, 2), (2, 3)]).valid
    chk = verify_component_matching(g, lab, [(1, 2)])
    assert chk.valid and chk.maximal
    assert not verify_component_matching(g, [0, 1, 2, 3], [(0, 1)]).maximal


def test_verify_one_d_rejections():
    g = generate("star", 4)
    lab = [0, 1, 2, 3]
    assert not verify_one_d(g, lab, {1, 2, 3}, {0}, 1, [(1, 0), (2, 0)]).valid
    assert verify_one_d(g, lab, {1, 2, 3}, {0}, 2, [(1, 0), (2, 0)]).maximal


def test_verify_constrained():
    inst = ConstrainedInstance(((1, 9), (2, 9), (3, 9)), {1: 1, 2: 2, 3: 3}, {1: 0, 2: 0, 3: 0}, 2)
    assert verify_constrained(inst, [(1, 9), (2, 9)]).maximal
    assert not verify_constrained(inst, [(1, 9), (2, 9), (3, 9)]).valid
    assert not verify_constrained(inst, [(1, 8)]).valid
    assert not verify_constrained(inst, [(1, 9)]).maximal
    assert verify_matching("constrained", M=[(1, 9)], instance=inst).valid
    with pytest.raises(ValueError):
        verify_matching("weird")
