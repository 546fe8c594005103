import random

import pytest

from congest_mdst.acceptance import flow_within_quarter, random_constrained_instance
from congest_mdst.components import Network
from congest_mdst.flow import (
    doubling_flow,
    doubling_rounds,
    every_path_has_full_node,
    flow_scale,
    prune_picks,
    round_flow,
)
from congest_mdst.graph import canon, generate
from congest_mdst.matchings import ConstrainedInstance, verify_constrained
from congest_mdst.oracles import constrained_network, maxflow
from congest_mdst.refine import decompose, instance_of
from congest_mdst.flow import constrained_matching
from congest_mdst.runtime import SimConfig


def test_flow_scale():
    assert flow_scale(1) == (3, 8)
    assert flow_scale(5) == (6, 320)
    assert doubling_rounds(5) == 7


def test_single_edge_reaches_an_eighth():
    inst = ConstrainedInstance(((1, 2),), {1: 1}, {1: 0}, 1)
    run = doubling_flow(inst)
    assert 8 * run.num[0] >= run.S
    rng = random.Random(0)
    got = []
    for _ in range(200):
        got = round_flow(inst, run, rng)
        if got:
            break
    assert got == [0]


@pytest.mark.parametrize("seed", range(40))
def test_doubling_invariants(seed):
    inst = random_constrained_instance(random.Random(seed))
    run = doubling_flow(inst)
    assert all(flow_within_quarter(inst, h, run.S) for h in run.history)
    assert every_path_has_full_node(inst, run.num, run.S)
    opt = maxflow(constrained_network(inst))
    assert 32 * run.value >= opt * run.S


@pytest.mark.parametrize("seed", range(20))
def test_rounding_is_always_feasible(seed):
    rng = random.Random(seed)
    inst = random_constrained_instance(rng)
    run = doubling_flow(inst)
    for _ in range(50):
        kept = round_flow(inst, run, rng)
        assert verify_constrained(inst, [inst.edges[i] for i in kept]).valid


def test_prune_rules():
    # branches 1, 2 in bundle 0; branch 3 in bundle 1; q = 1
    inst = ConstrainedInstance(((10, 7), (11, 8), (20, 7), (30, 7)),
                               {10: 1, 11: 1, 20: 2, 30: 3}, {1: 0, 2: 0, 3: 1}, 1)
    # branch 1 picked twice: dropped; 2 and 3 both hit node 7: dropped
    assert prune_picks(inst, [0, 1, 2, 3]) == []
    assert prune_picks(inst, [0, 3]) == []
    assert prune_picks(inst, [1, 3]) == [1, 3]
    # bundle 0 over q
    assert prune_picks(inst, [1, 2]) == []


def star_with_rim(n):
    g = generate("wheel", n)
    return g, frozenset(canon(0, i) for i in range(1, n))


@pytest.mark.parametrize("backend", ["fast", "engine"])
def test_distributed_flow_matches_reference(backend):
    g, T = star_with_rim(12)
    net = Network(g, SimConfig(seed=4), backend)
    dec = decompose(net, T, 11, 11)
    inst = instance_of(g, dec, 2)
    res = constrained_matching(net, dec, inst)
    ref = doubling_flow(inst)
    assert res.flow.num == ref.num and res.flow.S == ref.S
    assert verify_constrained(inst, res.edges).valid
    assert res.attempts >= 1


def test_distributed_flow_backends_agree():
    g, T = star_with_rim(16)
    outs = []
    for backend in ("fast", "engine"):
        net = Network(g, SimConfig(seed=8), backend)
        dec = decompose(net, T, 15, 15)
        res = constrained_matching(net, dec, instance_of(g, dec, 3))
        outs.append((res.edges, res.picks, net.metrics.rounds_executed))
    assert outs[0] == outs[1]
