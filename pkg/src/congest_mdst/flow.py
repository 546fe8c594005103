"""Constrained (1,q)-matchings through a shallow flow network.

The network is s -> leaf bundles (cap q) -> leaf branches (cap 1) -> Q
nodes (cap q on the edge to t). Every instance edge is one s-t path. Flow
values are integers over a common power-of-two scale ``S = m * 2**K``.

Stage one starts every path at S/(8m) and repeatedly doubles paths whose
bundle, branch and Q node are all below 1/8 of capacity. Stage two keeps
each edge with probability f(e) and drops overloaded branches, bundles and
Q nodes. ``doubling_flow``/``prune_picks`` are the centralized reference;
``constrained_matching`` runs the same procedure on a ``Network``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .matchings import ConstrainedInstance
from .runtime import bernoulli, define_kind, log2ceil

define_kind("FL_BR", "val")  # branch flow numerator, to the bundle root
define_kind("FL_BFULL", "flag")  # bundle full
define_kind("FL_SRC", "flag")  # my branch and bundle are both non-full
define_kind("FL_DBL")  # double the flow on my incoming paths
define_kind("RD_PICK", "id")  # target of my single pick
define_kind("RD_HAS")  # my branch kept one pick
define_kind("RD_BFAIL")  # bundle over capacity
define_kind("RD_QFAIL")  # Q node over capacity
define_kind("RD_FINAL", "id")  # surviving edge, to its destination

MAX_REDRAWS = 10


def flow_scale(m: int) -> tuple[int, int]:
    """(K, S) with S = m * 2**K and K = ceil(log2 m) + 3."""
    K = (log2ceil(m) if m > 1 else 0) + 3
    return K, m << K


def doubling_rounds(m: int) -> int:
    return flow_scale(m)[0] + 1


@dataclass
class FlowRun:
    S: int
    K: int
    num: list[int]  # per instance edge
    rounds: int
    max_load: float = 0.0  # max over rounds and network elements of flow / capacity
    history: list[list[int]] = field(default_factory=list)

    @property
    def value(self) -> int:
        return sum(self.num)


def _loads(inst: ConstrainedInstance, num: list[int]):
    fb: dict[int, int] = {}
    fbund: dict[int, int] = {}
    fq: dict[int, int] = {}
    for (u, v), x in zip(inst.edges, num):
        b = inst.branch[u]
        fb[b] = fb.get(b, 0) + x
        fbund[inst.bundle[b]] = fbund.get(inst.bundle[b], 0) + x
        fq[v] = fq.get(v, 0) + x
    return fb, fbund, fq


def full_flags(inst: ConstrainedInstance, num: list[int], S: int):
    """A node is full once its flow reaches 1/8 of its capacity."""
    fb, fbund, fq = _loads(inst, num)
    q = inst.q
    return ({b: 8 * x >= S for b, x in fb.items()},
            {b: 8 * x >= q * S for b, x in fbund.items()},
            {v: 8 * x >= q * S for v, x in fq.items()})


def max_load(inst: ConstrainedInstance, num: list[int], S: int) -> float:
    """Largest flow/capacity ratio over edges, branches, bundles and Q nodes."""
    if not num:
        return 0.0
    fb, fbund, fq = _loads(inst, num)
    q = inst.q
    worst = max(num) / S
    worst = max(worst, max(fb.values()) / S)
    worst = max(worst, max(fbund.values()) / (q * S), max(fq.values()) / (q * S))
    return worst


def doubling_flow(inst: ConstrainedInstance) -> FlowRun:
    m = len(inst.edges)
    K, S = flow_scale(max(m, 1))
    num = [1 << (K - 3)] * m
    run = FlowRun(S, K, num, doubling_rounds(max(m, 1)))
    run.max_load = max_load(inst, num, S)
    run.history.append(list(num))
    for _ in range(run.rounds):
        fb, fbund, fq = full_flags(inst, num, S)
        for i, (u, v) in enumerate(inst.edges):
            b = inst.branch[u]
            if not (fb[b] or fbund[inst.bundle[b]] or fq[v]):
                num[i] *= 2
        run.max_load = max(run.max_load, max_load(inst, num, S))
        run.history.append(list(num))
    return run


def every_path_has_full_node(inst: ConstrainedInstance, num: list[int], S: int) -> bool:
    fb, fbund, fq = full_flags(inst, num, S)
    return all(fb[inst.branch[u]] or fbund[inst.bundle[inst.branch[u]]] or fq[v] for u, v in inst.edges)


def prune_picks(inst: ConstrainedInstance, picks: Iterable[int]) -> list[int]:
    """Indices that survive the overload rules.

    A branch keeps its pick only if it made exactly one. Among those, a
    bundle or a Q node with more than q picks drops all of its picks.
    """
    picks = sorted(set(picks))
    per_branch: dict[int, list[int]] = {}
    for i in picks:
        per_branch.setdefault(inst.branch[inst.edges[i][0]], []).append(i)
    s1 = [ix[0] for ix in per_branch.values() if len(ix) == 1]
    per_bundle: dict[int, int] = {}
    per_q: dict[int, int] = {}
    for i in s1:
        u, v = inst.edges[i]
        bd = inst.bundle[inst.branch[u]]
        per_bundle[bd] = per_bundle.get(bd, 0) + 1
        per_q[v] = per_q.get(v, 0) + 1
    q = inst.q
    return sorted(i for i in s1 if per_bundle[inst.bundle[inst.branch[inst.edges[i][0]]]] <= q
                  and per_q[inst.edges[i][1]] <= q)


def round_flow(inst: ConstrainedInstance, run: FlowRun, rng: random.Random) -> list[int]:
    """One centralized rounding trial."""
    picks = [i for i, x in enumerate(run.num) if rng.randrange(run.S) < x]
    return prune_picks(inst, picks)


# ---------------------------------------------------------------- distributed

@dataclass
class ConstrainedResult:
    edges: list[tuple[int, int]]
    flow: FlowRun
    attempts: int
    picks: list[list[int]] = field(default_factory=list)  # per attempt, picked indices


def constrained_matching(net, dec, inst: ConstrainedInstance, label: str = "flow") -> ConstrainedResult:
    """Distributed doubling + rounding over branch components ``dec.comps``.

    Sources are nodes of leaf branches; the bundle root of a leaf branch is
    the parent of its root, which hears the branch root directly.
    """
    n, seed, comps = net.n, net.cfg.seed, dec.comps
    q = inst.q
    out_edges: dict[int, list[int]] = {}
    in_edges: dict[int, list[int]] = {}
    for i, (u, v) in enumerate(inst.edges):
        out_edges.setdefault(u, []).append(i)
        in_edges.setdefault(v, []).append(i)
    # every node learns m
    m = net.global_aggregate({u: [len(ix)] for u, ix in out_edges.items()}, 1, "sum", label)[0]
    K, S = flow_scale(max(m, 1))
    R = doubling_rounds(max(m, 1))
    num = [1 << (K - 3)] * len(inst.edges)  # each endpoint keeps its own copy; they agree
    run = FlowRun(S, K, num, R)
    run.max_load = max_load(inst, num, S)
    run.history.append(list(num))
    roots = {dec.branch_root[b]: b for b in dec.leaf}
    for _ in range(R):
        # branch flow, then bundle flow at the bundle root
        fb = net.aggregate({u: sum(num[i] for i in ix) for u, ix in out_edges.items()}, "sum", comps, label)
        inbox = net.exchange({r: ("FL_BR", (fb[r],)) for r in roots}, label)
        bfull_at: dict[int, bool] = {}
        for x in {dec.bundle[b] for b in dec.leaf}:
            tot = sum(vals[0] for s, k, vals in inbox[x] if k == "FL_BR" and s in roots
                      and dec.bundle[roots[s]] == x)
            bfull_at[x] = 8 * tot >= q * S
        inbox = net.exchange({x: ("FL_BFULL", (f,)) for x, f in bfull_at.items()}, label)
        src = {}
        for r, b in roots.items():
            for s, k, vals in inbox[r]:
                if k == "FL_BFULL" and s == dec.bundle[b]:
                    src[r] = ("FL_BFULL", vals)
        got = net.broadcast(src, comps, label)
        nonfull = {u: not (8 * fb[u] >= S) and not got[u][1][0] for u in out_edges}
        inbox_src = net.exchange({u: ("FL_SRC", (ok,)) for u, ok in nonfull.items()}, label)
        qfull = {v: 8 * sum(num[i] for i in ix) >= q * S for v, ix in in_edges.items()}
        inbox_dbl = net.exchange({v: ("FL_DBL", ()) for v, f in qfull.items() if not f}, label)
        for u, ix in out_edges.items():
            dbl = {s for s, k, _ in inbox_dbl[u] if k == "FL_DBL"}
            for i in ix:
                v = inst.edges[i][1]
                if nonfull[u] and v in dbl:
                    # v sees the same facts: it sent FL_DBL and heard u's FL_SRC flag
                    assert any(s == u and vals[0] for s, k, vals in inbox_src[v] if k == "FL_SRC")
                    num[i] *= 2
        run.max_load = max(run.max_load, max_load(inst, num, S))
        run.history.append(list(num))
    value = net.global_aggregate({u: [sum(num[i] for i in ix)] for u, ix in out_edges.items()},
                                 1, "sum", label)[0]
    res = ConstrainedResult([], run, 0)
    for attempt in range(1 + MAX_REDRAWS):
        res.attempts += 1
        r0 = net.round
        mine: dict[int, list[int]] = {}
        for u, ix in out_edges.items():
            mine[u] = [i for i in ix if bernoulli(seed, u, r0, "pick", num[i], S, inst.edges[i][1])]
        res.picks.append(sorted(i for ix in mine.values() for i in ix))
        cb = net.aggregate({u: len(p) for u, p in mine.items() if p}, "sum", comps, label)
        picker = {u: p[0] for u, p in mine.items() if len(p) == 1 and cb[u] == 1}
        inbox = net.exchange({u: ("RD_PICK", (inst.edges[i][1],)) for u, i in picker.items()}, label)
        qcount = {v: sum(1 for s, k, vals in inbox[v] if k == "RD_PICK" and vals[0] == v) for v in in_edges}
        inbox = net.exchange({r: ("RD_HAS", ()) for r in roots if cb[r] == 1}, label)
        fail = {}
        for x in {dec.bundle[b] for b in dec.leaf}:
            cnt = sum(1 for s, k, _ in inbox[x] if k == "RD_HAS" and s in roots and dec.bundle[roots[s]] == x)
            if cnt > q:
                fail[x] = ("RD_BFAIL", ())
        for v, c in qcount.items():
            if c > q:
                fail[v] = ("RD_QFAIL", ())
        inbox = net.exchange(fail, label)
        src = {}
        for r, b in roots.items():
            if any(k == "RD_BFAIL" and s == dec.bundle[b] for s, k, _ in inbox[r]):
                src[r] = ("RD_BFAIL", ())
        bfail = net.broadcast(src, comps, label)
        final = {}
        for u, i in picker.items():
            v = inst.edges[i][1]
            if bfail[u] is None and not any(k == "RD_QFAIL" and s == v for s, k, _ in inbox[u]):
                final[u] = ("RD_FINAL", (v,))
        inbox = net.exchange(final, label)
        kept = sorted(picker[u] for u in final)
        got = net.global_aggregate({u: [1] for u in final}, 1, "sum", label)[0]
        res.edges = [inst.edges[i] for i in kept]
        if got > 0 or value < S:
            break
    return res
