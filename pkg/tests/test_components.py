import math
import random

import pytest

from congest_mdst.components import (
    Components,
    InvariantViolation,
    Network,
    bfs_reference,
    build_global_bfs,
    check_views,
    component_merge,
)
from congest_mdst.graph import components_of, diameter, generate, is_forest
from congest_mdst.runtime import SimConfig

from conftest import components_from_forest


def forest_with_sizes(g, sizes, seed):
    """Grow disjoint BFS pieces of the requested sizes; the rest stay singletons."""
    rng = random.Random(seed)
    free = set(range(g.n))
    forest = set()
    for s in sizes:
        start = rng.choice(sorted(free))
        piece, frontier = {start}, [start]
        free.discard(start)
        while frontier and len(piece) < s:
            u = frontier.pop(0)
            for v in g.adj[u]:
                if v in free and len(piece) < s:
                    free.discard(v)
                    piece.add(v)
                    frontier.append(v)
                    forest.add((min(u, v), max(u, v)))
    return forest


def test_bfs_height_examples():
    assert build_global_bfs(generate("star", 5), SimConfig())[0].height == 1
    assert build_global_bfs(generate("path", 6), SimConfig())[0].height == 5


@pytest.mark.parametrize("seed", range(3))
def test_bfs_matches_reference(seed):
    g = generate("random-connected", 50, {}, seed)
    tree, _ = build_global_bfs(g, SimConfig())
    assert tree.depth == bfs_reference(g).depth


def test_broadcast_whole_path():
    g = generate("path", 5)
    net = Network(g, SimConfig(), "engine")
    comps = components_from_forest(g, g.edges)
    got = net.broadcast({0: ("MRG_SAT", (3,))}, comps)
    assert got == [("MRG_SAT", (3,))] * 5


def test_broadcast_singletons_keep_own_message():
    g = generate("path", 2)
    net = Network(g, SimConfig(), "engine")
    got = net.broadcast({0: ("MRG_SAT", (1,)), 1: ("MRG_SAT", (2,))})
    assert got == [("MRG_SAT", (1,)), ("MRG_SAT", (2,))]


@pytest.fixture(scope="module")
def mixed():
    g = generate("random-connected", 400, {"p": 0.02}, 3)
    rng = random.Random(5)
    sizes = [30, 25, 40] + [rng.randint(2, 12) for _ in range(20)]
    comps = components_from_forest(g, forest_with_sizes(g, sizes, 1))
    check_views(g, comps)
    return g, comps


@pytest.mark.parametrize("backend", ["fast", "engine"])
def test_broadcast_mixed_small_and_large(mixed, backend):
    g, comps = mixed
    nlarge = len({v.leader_id for v in comps.views if v.is_large})
    assert nlarge == 3
    groups = comps.groups()
    sources = {}
    for lead, ms in groups.items():
        if len(ms) > 1:
            src = max(ms)
            sources[src] = ("MRG_NEW", (lead, len(ms)))
    net = Network(g, SimConfig(), backend)
    before = net.metrics.rounds_executed
    got = net.broadcast(sources, comps)
    for lead, ms in groups.items():
        want = ("MRG_NEW", (lead, len(ms))) if len(ms) > 1 else None
        assert all(got[u] == want for u in ms)
    assert net.metrics.rounds_executed - before == net.r_max
    if backend == "engine":
        bound = 2 * (2 * (diameter(g) + math.sqrt(g.n)) + 4)
        assert net.last_engine_rounds <= bound


@pytest.mark.parametrize("op", ["max", "sum"])
def test_aggregate_engine_matches_fast_and_truth(mixed, op):
    g, comps = mixed
    rng = random.Random(op)
    values = {u: rng.randrange(1000) for u in range(g.n) if rng.random() < 0.6}
    outs = {}
    for backend in ("fast", "engine"):
        net = Network(g, SimConfig(), backend)
        outs[backend] = net.aggregate(values, op, comps)
        if backend == "engine":
            assert net.metrics.messages_sent > 0
    assert outs["fast"] == outs["engine"]
    for lead, ms in comps.groups().items():
        vals = [values[u] for u in ms if u in values]
        want = (sum(vals) if op == "sum" else (max(vals) if vals else None))
        assert all(outs["fast"][u] == want for u in ms)


def test_global_aggregate_engine_matches_fast():
    g = generate("grid", 49)
    vecs = {u: [u % 3, 1, u] for u in range(49)}
    a = Network(g, SimConfig(), "fast").global_aggregate(vecs, 3, "sum")
    b = Network(g, SimConfig(), "engine").global_aggregate(vecs, 3, "sum")
    assert a == b == [sum(u % 3 for u in range(49)), 49, sum(range(49))]
    assert Network(g, SimConfig(), "engine").global_aggregate({5: [7]}, 1, "max") == [7]


def test_refresh_large(mixed):
    g, comps = mixed
    comps = Components(list(comps.views), comps.fadj, ())
    net = Network(g, SimConfig(), "engine")
    got = net.refresh_large(comps)
    assert got == tuple(sorted({v.leader_id for v in comps.views if v.is_large}))


def test_check_views_detects_bad_size():
    g = generate("path", 4)
    comps = components_from_forest(g, {(0, 1)})
    comps.views[1] = comps.views[1].__class__(0, 0, 3, False)
    with pytest.raises(InvariantViolation):
        check_views(g, comps)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("backend", ["fast", "engine"])
def test_merge_keeps_invariant(seed, backend):
    g = generate("random-connected", 60, {"p": 0.08}, seed)
    net = Network(g, SimConfig(seed=seed), backend)
    comps = net.comps
    rng = random.Random(seed)
    # a matching between singletons, then satellites attached to matched nodes
    used = set()
    M = []
    for u, v in sorted(g.edges):
        if u not in used and v not in used and rng.random() < 0.5:
            M.append((u, v))
            used |= {u, v}
    Mp = []
    for s in range(g.n):
        if s in used:
            continue
        centers = [c for c in g.adj[s] if c in used]
        if centers:
            Mp.append((s, centers[0]))
    component_merge(net, M, Mp, comps)
    forest = set(M) | {(min(a, b), max(a, b)) for a, b in Mp}
    assert is_forest(g.n, forest)
    part = check_views(g, comps)
    assert len(part) == len(components_of(g, forest))


def test_merge_engine_equals_fast():
    g = generate("random-connected", 80, {"p": 0.06}, 9)
    res = []
    for backend in ("fast", "engine"):
        net = Network(g, SimConfig(seed=1), backend)
        M = []
        used = set()
        for u, v in sorted(g.edges):
            if u not in used and v not in used and (u + v) % 3 == 0:
                M.append((u, v))
                used |= {u, v}
        Mp = [(s, next(c for c in g.adj[s] if c in used)) for s in range(g.n)
              if s not in used and any(c in used for c in g.adj[s])]
        component_merge(net, M, Mp, net.comps)
        res.append((list(net.comps.views), net.metrics.rounds_executed))
    assert res[0] == res[1]
