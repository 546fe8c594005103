"""Distributed matchings over components, plus centralized checkers.

``component_matching`` is an Israeli-Itai style proposal/accept scheme in
which whole components play the role of vertices. ``d_cm`` is a Luby style
scheme for (1,d)-component matchings: components of U on one side, single
nodes of Q with capacity d on the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .components import Components, Network
from .graph import Edge, Graph, canon
from .runtime import coin, define_kind, log2ceil, randbelow

define_kind("CM_STAT", "id", "flag")  # leader, still active
define_kind("CM_PROP", "id")  # target
define_kind("CM_ACC", "id")  # target
define_kind("CM_NOTE")  # our proposal was accepted
define_kind("CM_CHOICE", "id", "id")  # chosen edge
define_kind("CM_COMMIT", "id")  # target
define_kind("CM_DONE", "id", "id")  # matched edge
define_kind("DCM_B")  # still in B
define_kind("DCM_PROP", "id", "key")  # target, r(e)
define_kind("DCM_THR", "key")  # smallest accepted value
define_kind("DCM_WON", "id", "id")  # accepted edge

DEFAULT_C = 8


def iterations(n: int, c: int = DEFAULT_C) -> int:
    return c * log2ceil(n)


def edge_code(n: int, u: int, v: int) -> int:
    a, b = canon(u, v)
    return a * n + b


def decode_edge(n: int, code: int) -> Edge:
    return divmod(code, n)


def far_end(n: int, key: int, u: int) -> int:
    """The endpoint other than u of the edge encoded in the low digits of key."""
    a, b = decode_edge(n, key % (n * n))
    return b if a == u else a


@dataclass
class ComponentMatching:
    edges: set[Edge]
    iterations: int
    proposers: list[set[int]] = field(default_factory=list)  # per iteration, leaders that proposed
    retired: list[set[int]] = field(default_factory=list)  # per iteration, leaders retired so far


@dataclass
class OneDMatching:
    edges: list[tuple[int, int]]  # (endpoint in a U component, endpoint in Q)
    U: set[int]
    Q: set[int]
    d: int
    iterations: int
    proposers: list[set[int]] = field(default_factory=list)


def cm_iteration_rounds(net: Network) -> int:
    return 4 + 5 * net.r_max


def dcm_iteration_rounds(net: Network) -> int:
    return 3 + 2 * net.r_max


def component_matching(net: Network, comps: Components | None = None, c: int = DEFAULT_C,
                       label: str = "cm") -> ComponentMatching:
    """Component matching of the current partition; valid always, maximal w.h.p."""
    comps = comps or net.comps
    g, n, seed = net.g, net.n, net.cfg.seed
    n2, n3 = n * n, n ** 3
    lead = [comps.leader(u) for u in range(n)]
    active = {lead[u] for u in range(n)}
    M: set[Edge] = set()
    out = ComponentMatching(M, iterations(n, c))
    for it in range(out.iterations):
        if not any(lead[u] != lead[v] and lead[u] in active and lead[v] in active for u, v in g.edges):
            # nothing can change any more: charge the remaining schedule
            rest = out.iterations - it
            out.proposers += [set() for _ in range(rest)]
            out.retired += [{lead[u] for u in range(n)} - active for _ in range(rest)]
            net.idle(rest * cm_iteration_rounds(net), label)
            break
        # status of every neighbour
        inbox = net.exchange({u: ("CM_STAT", (lead[u], lead[u] in active)) for u in range(n)}, label)
        # stage 1: best outgoing edge per active component
        r0 = net.round
        r_u: dict[int, int] = {}
        for u in range(n):
            if lead[u] not in active:
                continue
            best = None
            for s, _, (ls, act) in inbox[u]:
                if act and ls != lead[u]:
                    key = randbelow(seed, u, r0, "cm-prio", n3, s) * n2 + edge_code(n, u, s)
                    best = key if best is None or key > best else best
            if best is not None:
                r_u[u] = best
        top = net.aggregate(r_u, "max", comps, label)
        props = {u: ("CM_PROP", (far_end(n, k, u),)) for u, k in r_u.items() if k == top[u]}
        out.proposers.append({lead[u] for u in props})
        out.retired.append({lead[u] for u in range(n)} - active)
        inbox = net.exchange(props, label)
        # stage 2: best incoming proposal per active component
        r1 = net.round
        p_u: dict[int, int] = {}
        for v in range(n):
            if lead[v] not in active:
                continue
            for s, _, (tgt,) in inbox[v]:
                if tgt == v:
                    key = randbelow(seed, v, r1, "cm-acc", n3, s) * n2 + edge_code(n, v, s)
                    p_u[v] = max(p_u.get(v, -1), key)
        top2 = net.aggregate(p_u, "max", comps, label)
        accs = {v: ("CM_ACC", (far_end(n, k, v),)) for v, k in p_u.items() if k == top2[v]}
        inbox = net.exchange(accs, label)
        # stage 3: the proposer tells its component; the leader picks one edge
        notes = {}
        for u in props:
            if any(k == "CM_ACC" and vals[0] == u for s, k, vals in inbox[u]
                   if s == props[u][1][0]):
                notes[u] = ("CM_NOTE", ())
        heard = net.broadcast(notes, comps, label)
        r2 = net.round
        choice = {}
        for u in range(n):
            if lead[u] != u or u not in active:
                continue
            prop_ok = heard[u] is not None
            acc = top2[u]
            opts = []
            if prop_ok:
                opts.append(decode_edge(n, top[u] % n2))
            if acc is not None:
                opts.append(decode_edge(n, acc % n2))
            if not opts:
                continue
            e = opts[0] if len(opts) == 1 else opts[int(coin(seed, u, r2, "cm-coin"))]
            choice[u] = ("CM_CHOICE", e)
        chosen = net.broadcast(choice, comps, label)
        commits = {}
        for u in range(n):
            if chosen[u] is not None and u in chosen[u][1]:
                a, b = chosen[u][1]
                commits[u] = ("CM_COMMIT", (a + b - u,))
        inbox = net.exchange(commits, label)
        done = {}
        for u, (_, (tgt,)) in commits.items():
            if any(s == tgt and k == "CM_COMMIT" and vals[0] == u for s, k, vals in inbox[u]):
                done[u] = ("CM_DONE", canon(u, tgt))
        fin = net.broadcast(done, comps, label)
        for u in range(n):
            if fin[u] is not None:
                M.add(tuple(fin[u][1]))
        active -= {lead[u] for u in range(n) if fin[u] is not None}
    return out


def d_cm(net: Network, U: Iterable[int], Q: Iterable[int], d: int, comps: Components | None = None,
         c: int = DEFAULT_C, label: str = "dcm") -> OneDMatching:
    """(1,d)-component matching between components with leaders in U and nodes in Q."""
    comps = comps or net.comps
    g, n, seed = net.g, net.n, net.cfg.seed
    n2, n3 = n * n, n ** 3
    U, Q = set(U), set(Q)
    lead = [comps.leader(u) for u in range(n)]
    A = set(U)
    B = set(Q)
    load = {v: 0 for v in Q}
    out = OneDMatching([], U, Q, d, iterations(n, c))
    for it in range(out.iterations):
        if not A or not any((lead[u] in A and v in B) or (lead[v] in A and u in B) for u, v in g.edges):
            rest = out.iterations - it
            out.proposers += [set() for _ in range(rest)]
            net.idle(rest * dcm_iteration_rounds(net), label)
            break
        inbox = net.exchange({v: ("DCM_B", ()) for v in B}, label)
        r0 = net.round
        r_e: dict[int, int] = {}
        for u in range(n):
            if lead[u] not in A:
                continue
            for s, k, _ in inbox[u]:
                key = randbelow(seed, u, r0, "dcm-r", n3, s) * n2 + edge_code(n, u, s)
                r_e[u] = max(r_e.get(u, -1), key)
        top = net.aggregate(r_e, "max", comps, label)
        props = {u: ("DCM_PROP", (far_end(n, k, u), k)) for u, k in r_e.items() if k == top[u]}
        out.proposers.append({lead[u] for u in props})
        inbox = net.exchange(props, label)
        thr = {}
        for v in sorted(B):
            keys = sorted((vals[1] for s, kind, vals in inbox[v] if vals[0] == v), reverse=True)
            f = min(len(keys), d - load[v])
            if f > 0:
                thr[v] = ("DCM_THR", (keys[f - 1],))
                load[v] += f
            if load[v] >= d:
                B.discard(v)
        inbox = net.exchange(thr, label)
        won = {}
        for u, (_, (tgt, key)) in props.items():
            for s, kind, vals in inbox[u]:
                if s == tgt and key >= vals[0]:
                    won[u] = ("DCM_WON", (u, tgt))
                    out.edges.append((u, tgt))
        fin = net.broadcast(won, comps, label)
        A -= {lead[u] for u in range(n) if fin[u] is not None}
    return out


# ---------------------------------------------------------------- checkers

@dataclass(frozen=True)
class MatchCheck:
    valid: bool
    maximal: bool
    reason: str = ""


def verify_component_matching(g: Graph, label: Mapping[int, int] | list[int], M: Iterable[Edge]) -> MatchCheck:
    """``label[u]`` names u's component."""
    M = [canon(*e) for e in M]
    touched: set[int] = set()
    for u, v in M:
        if not g.has_edge(u, v):
            return MatchCheck(False, False, f"{(u, v)} is not an edge")
        if label[u] == label[v]:
            return MatchCheck(False, False, f"{(u, v)} lies inside one component")
        for x in (label[u], label[v]):
            if x in touched:
                return MatchCheck(False, False, f"component {x} is touched twice")
            touched.add(x)
    for u, v in g.edges:
        if label[u] != label[v] and label[u] not in touched and label[v] not in touched:
            return MatchCheck(True, False, f"{(u, v)} could be added")
    return MatchCheck(True, True)


def verify_one_d(g: Graph, label, U: Iterable[int], Q: Iterable[int], d: int,
                 M: Iterable[tuple[int, int]]) -> MatchCheck:
    """M holds (U-side endpoint, Q-side endpoint) pairs; U holds component labels."""
    U, Q = set(U), set(Q)
    touched: set[int] = set()
    load: dict[int, int] = {}
    for u, v in M:
        if not g.has_edge(u, v):
            return MatchCheck(False, False, f"{(u, v)} is not an edge")
        if label[u] not in U or v not in Q or label[v] in U:
            return MatchCheck(False, False, f"{(u, v)} does not join U to Q")
        if label[u] in touched:
            return MatchCheck(False, False, f"component {label[u]} is touched twice")
        touched.add(label[u])
        load[v] = load.get(v, 0) + 1
        if load[v] > d:
            return MatchCheck(False, False, f"node {v} exceeds capacity {d}")
    for a, b in g.edges:
        for u, v in ((a, b), (b, a)):
            if label[u] in U and label[u] not in touched and v in Q and label[v] not in U \
                    and load.get(v, 0) < d:
                return MatchCheck(True, False, f"{(u, v)} could be added")
    return MatchCheck(True, True)


@dataclass(frozen=True)
class ConstrainedInstance:
    """Bipartite instance for constrained (1,q)-matchings.

    ``edges`` are oriented (source node, destination node); ``branch`` maps
    each source to its leaf branch and ``bundle`` maps a branch to its bundle.
    """

    edges: tuple[tuple[int, int], ...]
    branch: Mapping[int, int]
    bundle: Mapping[int, int]
    q: int


def verify_constrained(inst: ConstrainedInstance, M: Iterable[tuple[int, int]]) -> MatchCheck:
    M = list(M)
    allowed = set(inst.edges)
    per_branch: dict[int, int] = {}
    per_bundle: dict[int, int] = {}
    per_dest: dict[int, int] = {}
    if len(set(M)) != len(M):
        return MatchCheck(False, False, "repeated edge")
    for u, v in M:
        if (u, v) not in allowed:
            return MatchCheck(False, False, f"{(u, v)} is not an instance edge")
        b = inst.branch[u]
        per_branch[b] = per_branch.get(b, 0) + 1
        per_bundle[inst.bundle[b]] = per_bundle.get(inst.bundle[b], 0) + 1
        per_dest[v] = per_dest.get(v, 0) + 1
        if per_branch[b] > 1:
            return MatchCheck(False, False, f"branch {b} has two edges")
        if per_bundle[inst.bundle[b]] > inst.q:
            return MatchCheck(False, False, f"bundle {inst.bundle[b]} exceeds q")
        if per_dest[v] > inst.q:
            return MatchCheck(False, False, f"node {v} exceeds q")
    used = set(M)
    for u, v in inst.edges:
        b = inst.branch[u]
        if (u, v) not in used and per_branch.get(b, 0) == 0 \
                and per_bundle.get(inst.bundle[b], 0) < inst.q and per_dest.get(v, 0) < inst.q:
            return MatchCheck(True, False, f"{(u, v)} could be added")
    return MatchCheck(True, True)


def verify_matching(kind: str, g: Graph | None = None, M=(), label=None, U=(), Q=(), d: int = 1,
                    instance: ConstrainedInstance | None = None) -> MatchCheck:
    if kind == "component":
        return verify_component_matching(g, label, M)
    if kind == "one_d":
        return verify_one_d(g, label, U, Q, d, M)
    if kind == "constrained":
        return verify_constrained(instance, M)
    raise ValueError(f"unknown matching kind {kind!r}")
