import math
import random

import networkx as nx
import pytest

from congest_mdst.components import Network
from congest_mdst.graph import canon, degrees, generate, is_spanning_tree
from congest_mdst.mdst_log import matching_mdst
from congest_mdst.oracles import valid_improvements
from congest_mdst.refine import (
    EmptyHighDegreeSet,
    TAU,
    apply_improvement,
    block_index,
    choose_block,
    compute_weight,
    decompose,
    decompose_reference,
    epochs,
    good_edges,
    h_param,
    improve,
    instance_of,
    rehab,
    z_schedule,
)
from congest_mdst.runtime import SimConfig


def hub_tree(n):
    return frozenset(canon(0, i) for i in range(1, n))


def spider_tree(legs, length):
    edges, nxt = [], 1
    for _ in range(legs):
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev, nxt = nxt, nxt + 1
    return frozenset(canon(*e) for e in edges)


def random_tree(n, rng):
    return frozenset(canon(u, rng.randrange(u)) for u in range(1, n))


def test_h_param():
    assert h_param(2) == 68 and h_param(1) == 36


def test_decompose_star():
    dec = decompose_reference(9, hub_tree(9), 5)
    assert dec.root == 0
    assert len(dec.leaf) == 8
    assert set(dec.bundle.values()) == {0}
    assert dec.bundles() == {0: list(range(1, 9))}


def test_decompose_path_has_no_high_degree():
    path = frozenset((i, i + 1) for i in range(9))
    with pytest.raises(EmptyHighDegreeSet):
        decompose_reference(10, path, 3)
    g = generate("path", 10)
    with pytest.raises(EmptyHighDegreeSet):
        decompose(Network(g, SimConfig()), path, 3, 3)


def test_decompose_spider_against_networkx():
    T = spider_tree(3, 3)
    dec = decompose_reference(10, T, 3)
    G = nx.Graph(list(T))
    G.remove_nodes_from(dec.X)
    comps = sorted(sorted(c) for c in nx.connected_components(G))
    assert comps == [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert sorted(dec.members.values()) == comps
    assert dec.leaf == frozenset({3, 6, 9})
    assert set(dec.bundle.values()) == {0}
    assert {dec.branch_root[b] for b in dec.leaf} == {1, 4, 7}


@pytest.mark.parametrize("seed", range(10))
def test_decompose_random_trees(seed):
    rng = random.Random(seed)
    n = 60
    T = random_tree(n, rng)
    deg = degrees(T, n)
    gamma = sorted(deg)[-4]
    dec = decompose_reference(n, T, gamma)
    G = nx.Graph(list(T))
    G.remove_nodes_from(dec.X)
    for comp in nx.connected_components(G):
        bid = max(comp)
        assert all(dec.branch[u] == bid for u in comp)
        exits = sum(1 for u in comp for v in T_adj(T, u) if v in dec.X)
        assert (bid in dec.leaf) == (exits == 1)
    assert dec.nonleaf_adjacencies <= 2 * (len(dec.X) - 1)


def T_adj(T, u):
    return [b if a == u else a for a, b in T if u in (a, b)]


@pytest.mark.parametrize("backend", ["fast", "engine"])
def test_distributed_decompose_equals_reference(backend):
    g = generate("spider", 40, {}, 0)
    T = frozenset(e for e in g.edges if e[0] == 0 or abs(e[0] - e[1]) == 13)
    assert is_spanning_tree(g, T)
    dec = decompose(Network(g, SimConfig(), backend), T, 5, 3)
    ref = decompose_reference(40, T, 5, 3)
    assert dec.branch == ref.branch and dec.leaf == ref.leaf and dec.bundle == ref.bundle


def test_good_edges_are_doubled_between_leaf_branches():
    g = generate("wheel", 9)
    dec = decompose_reference(9, hub_tree(9), 5, 3)
    ge = good_edges(g, dec)
    assert len(ge) == 16
    assert all((v, u) in ge for u, v in ge)


def test_improve_without_good_edges_is_identity():
    g = generate("star", 9)
    res = improve(Network(g, SimConfig()), hub_tree(9), 5, 3, 2)
    assert res.M_bar == [] and res.tree == hub_tree(9)


def test_improve_star_with_rim_against_exhaustive():
    g = generate("wheel", 9)
    T = hub_tree(9)
    dec = decompose_reference(9, T, 5, 3)
    cands = list(instance_of(g, dec, 2).edges)
    legal = [sorted(s) for s in valid_improvements(T, dec, cands, 2)]
    best_drop = max(len(s) for s in legal)
    assert best_drop == 2
    drops = []
    for seed in range(20):
        res = improve(Network(g, SimConfig(seed=seed)), T, 5, 3, 2)
        assert sorted(res.M_bar) in legal
        assert is_spanning_tree(g, res.tree)
        drops.append(8 - degrees(res.tree, 9)[0])
        assert drops[-1] == len(res.M_bar)
    assert max(drops) >= 1


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("kind,n", [("wheel", 60), ("spider", 61), ("caterpillar", 80)])
def test_improve_typing(kind, n, seed):
    g = generate(kind, n, {"spine": 3} if kind == "caterpillar" else {}, seed)
    T = frozenset(nx.bfs_tree(nx.Graph(list(g.edges)), max(range(n), key=g.degree)).to_undirected().edges())
    T = frozenset(canon(*e) for e in T)
    k = max(degrees(T, n))
    gamma, gamma0, q = k, max(2, k // 3), 3
    res = improve(Network(g, SimConfig(seed=seed)), T, gamma, gamma0, q)
    d1 = degrees(res.tree, n)
    d0 = degrees(T, n)
    assert is_spanning_tree(g, res.tree)
    for u, _ in res.M_bar:
        assert d1[res.dec.bundle[res.dec.branch[u]]] >= gamma - q
    assert all(d1[v] <= gamma0 + q for v in range(n) if d1[v] > d0[v])


def test_improve_engine_equals_fast():
    g = generate("wheel", 25)
    outs = []
    for backend in ("fast", "engine"):
        net = Network(g, SimConfig(seed=3), backend)
        res = improve(net, hub_tree(25), 24, 24, 3)
        outs.append((res.tree, res.M_hat, net.metrics.rounds_executed))
    assert outs[0] == outs[1]


def test_apply_improvement_swaps_branch_edge():
    dec = decompose_reference(9, hub_tree(9), 5, 3)
    T2 = apply_improvement(hub_tree(9), dec, [(1, 2)])
    assert (0, 1) not in T2 and (1, 2) in T2 and len(T2) == 8


def naive_weight(deg, h, z):
    total, C = 0, {}
    for d in deg:
        js = [j for j in range(len(deg) + 2) if d >= h + j * z]
        for j in js:
            C[j] = C.get(j, 0) + 1
        if not js:
            total += 1
            continue
        j = max(js)
        total += 1 + (d - h - j * z) * TAU ** j + z * sum(TAU ** s for s in range(j))
    return total, [C[j] for j in sorted(C)]


def test_weight_examples():
    assert compute_weight([3, 5, 1, 2], 10, 2) == (4, [])
    h, z = 10, 3
    w, C = compute_weight([h + z, 1, 2], h, z)
    assert w == (1 + z) + 2 and C == [1, 1]


@pytest.mark.parametrize("seed", range(10))
def test_weight_matches_brute_force(seed):
    rng = random.Random(seed)
    deg = [rng.choice([1, 2, 3, rng.randint(1, 80)]) for _ in range(100)]
    h, z = rng.randint(4, 20), rng.randint(1, 6)
    assert compute_weight(deg, h, z) == naive_weight(deg, h, z)


def test_block_helpers():
    assert block_index(9, 10, 2) == -1
    assert block_index(13, 10, 2) == 1
    assert choose_block([8, 2, 0]) == 0
    assert choose_block([4, 1]) == 0  # tie: 4 * 1 == 1 * 4
    assert choose_block([4, 2, 1]) == 2


def test_rehab_below_b2_makes_no_wave():
    g = generate("wheel", 30)
    T = hub_tree(30)
    res = rehab(Network(g, SimConfig()), T, 5, 20)  # b_2 = 30 > 29
    assert res.waves == [] and res.tree == T


def test_rehab_terminates_with_empty_high_blocks():
    n = 120
    g = generate("wheel", n)
    h, z = 20, 4
    res = rehab(Network(g, SimConfig(seed=1)), hub_tree(n), z, h)
    _, C = compute_weight(degrees(res.tree, n), h, z)
    top = math.ceil(math.log(n, TAU)) + 1
    assert len(C) <= top
    assert all(C[j] * TAU ** j <= max(C[0], C[1] * TAU if len(C) > 1 else 0) for j in range(len(C)))
    for w in res.waves:
        assert w.w_after <= w.w_before
    assert all(is_spanning_tree(g, t) for t in res.trees)


def test_z_schedule():
    assert z_schedule(17, 9) == [2, 1]
    assert z_schedule(10, 68) == [1]


def test_epochs_trivial_when_already_low():
    g = generate("random-connected", 60, {}, 0)
    r = matching_mdst(g, SimConfig())
    res = epochs(Network(g, SimConfig()), r.tree, r.d_hat_final)
    assert res.tree == r.tree and res.z_schedule == [1]


@pytest.mark.parametrize("start", ["mdst", "hub"])
def test_epochs_caterpillar_of_stars(start):
    n = 200
    g = generate("caterpillar", n, {"spine": 4}, 0)
    net = Network(g, SimConfig(seed=2))
    r = matching_mdst(g, net.cfg, net=net)
    if start == "mdst":
        T0 = r.tree
    else:
        T0 = frozenset(canon(*e) for e in nx.bfs_tree(nx.Graph(list(g.edges)), 0).to_undirected().edges())
    res = epochs(net, T0, r.d_hat_final)
    assert res.all_spanning and is_spanning_tree(g, res.tree)
    assert res.final_max_degree <= res.h + math.ceil(math.log(n, TAU)) + 2


def test_epochs_requires_spanning_tree():
    g = generate("path", 5)
    with pytest.raises(ValueError):
        epochs(Network(g, SimConfig()), {(0, 1)})


def test_pruning_keeps_an_eighth_on_average():
    g = generate("wheel", 41)
    hat = bar = 0
    for seed in range(60):
        res = improve(Network(g, SimConfig(seed=seed)), hub_tree(41), 40, 40, 4)
        hat += len(res.M_hat)
        bar += len(res.M_bar)
    assert bar >= hat / 8
