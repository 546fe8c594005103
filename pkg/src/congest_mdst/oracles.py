"""Centralized brute-force references used as ground truth in the tests.

Everything here is exponential or polynomial-but-centralized and meant for
small instances only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import networkx as nx
import numpy as np

from .graph import Edge, Graph, UnionFind, canon, degrees
from .matchings import ConstrainedInstance


class OracleTooLarge(ValueError):
    pass


# ---------------------------------------------------------------- spanning trees

def count_spanning_trees(g: Graph) -> int:
    """Kirchhoff's matrix-tree theorem (rounded float determinant)."""
    if g.n == 1:
        return 1
    L = np.zeros((g.n, g.n))
    for u, v in g.edges:
        L[u, u] += 1
        L[v, v] += 1
        L[u, v] -= 1
        L[v, u] -= 1
    return int(round(np.linalg.det(L[1:, 1:])))


def spanning_trees(g: Graph, max_degree: int | None = None) -> Iterator[frozenset]:
    """All spanning trees (of maximum degree <= ``max_degree`` if given), by
    include/exclude over the sorted edge list."""
    edges = sorted(g.edges)
    n = g.n
    cap = n if max_degree is None else max_degree
    deg = [0] * n

    def connected_without(excluded: set) -> bool:
        uf = UnionFind(n)
        comps = n
        for e in edges:
            if e not in excluded and uf.union(*e):
                comps -= 1
        return comps == 1

    def rec(i: int, chosen: list, uf_parent: list, excluded: set):
        if len(chosen) == n - 1:
            yield frozenset(chosen)
            return
        if i == len(edges):
            return
        u, v = edges[i]
        uf = UnionFind(n)
        uf.parent = list(uf_parent)
        if uf.find(u) != uf.find(v) and deg[u] < cap and deg[v] < cap:
            uf.union(u, v)
            chosen.append((u, v))
            deg[u] += 1
            deg[v] += 1
            yield from rec(i + 1, chosen, uf.parent, excluded)
            deg[u] -= 1
            deg[v] -= 1
            chosen.pop()
        excluded.add((u, v))
        if connected_without(excluded):
            yield from rec(i + 1, chosen, uf_parent, excluded)
        excluded.discard((u, v))

    if n == 1:
        yield frozenset()
        return
    yield from rec(0, [], list(range(n)), set())


def _degree_lower_bound(g: Graph) -> int:
    """max over v of the number of components of G - v (and 1 or 2 trivially)."""
    if g.n <= 1:
        return 0
    lb = 1 if g.n == 2 else 2
    for v in range(g.n):
        seen = {v}
        parts = 0
        for s in g.adj[v]:
            if s in seen:
                continue
            parts += 1
            stack = [s]
            seen.add(s)
            while stack:
                x = stack.pop()
                for y in g.adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        lb = max(lb, parts)
    return lb


def _bfs_tree(g: Graph) -> frozenset:
    parent = {0: -1}
    order = [0]
    for u in order:
        for v in g.adj[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
    return frozenset(canon(u, p) for u, p in parent.items() if p >= 0)


@dataclass
class SearchStats:
    nodes: int = 0
    cap: int = 10 ** 7
    exhausted: bool = False


def bounded_degree_tree(g: Graph, d: int, stats: SearchStats | None = None) -> frozenset | None:
    """A spanning tree of maximum degree <= d, or None if none exists.

    Include/exclude search with propagation: bridges of the remaining graph
    are forced in, edges at saturated nodes are forced out. Sets
    ``stats.exhausted`` and returns None when the node cap is hit.
    """
    stats = stats or SearchStats()
    n = g.n
    if n == 1:
        return frozenset()
    all_edges = sorted(g.edges)

    def rec(inc: set, exc: set):
        stats.nodes += 1
        if stats.nodes > stats.cap:
            stats.exhausted = True
            return None
        inc, exc = set(inc), set(exc)
        while True:
            deg = degrees(inc, n)
            changed = False
            for e in all_edges:
                if e in inc or e in exc:
                    continue
                u, v = e
                if deg[u] >= d or deg[v] >= d:
                    exc.add(e)
                    changed = True
            live = nx.Graph()
            live.add_nodes_from(range(n))
            live.add_edges_from(e for e in all_edges if e not in exc)
            if not nx.is_connected(live):
                return None
            uf = UnionFind(n)
            for e in inc:
                if not uf.union(*e):
                    return None
            for a, b in nx.bridges(live):
                e = canon(a, b)
                if e not in inc:
                    inc.add(e)
                    changed = True
            if any(c > d for c in degrees(inc, n)):
                return None
            if not changed:
                break
        uf = UnionFind(n)
        for e in inc:
            if not uf.union(*e):
                return None
        if len(inc) == n - 1:
            return frozenset(inc)
        # branch on the undecided edge at the most loaded endpoint
        deg = degrees(inc, n)
        cand = [e for e in all_edges if e not in inc and e not in exc and uf.find(e[0]) != uf.find(e[1])]
        if not cand:
            return None
        drop = [e for e in all_edges if e not in inc and e not in exc and uf.find(e[0]) == uf.find(e[1])]
        e = max(cand, key=lambda e: (max(deg[e[0]], deg[e[1]]), -e[0], -e[1]))
        got = rec(inc | {e}, exc | set(drop))
        if got is not None or stats.exhausted:
            return got
        return rec(inc, exc | {e} | set(drop))

    return rec(set(), set())


@dataclass
class MdstSolution:
    d: int | None  # None: unknown (search cap hit)
    tree: frozenset | None
    method: str
    search_nodes: int = 0


def exact_mdst(g: Graph, method: str = "auto", cap: int = 10 ** 7) -> MdstSolution:
    """Minimum possible maximum degree over all spanning trees of g.

    ``enumerate`` walks spanning trees under a degree cap raised one step at
    a time (n <= 10); ``search`` runs the propagating degree-bounded search
    upward from a cut-vertex lower bound (n <= 60).
    """
    if method == "auto":
        method = "enumerate" if g.n <= 10 else "search"
    if method == "enumerate":
        if g.n > 10:
            raise OracleTooLarge("enumeration handles n <= 10")
        if g.n == 1:
            return MdstSolution(0, frozenset(), "enumerate")
        for d in range(1, g.n):
            t = next(spanning_trees(g, d), None)
            if t is not None:
                return MdstSolution(d, t, "enumerate")
    if method == "search":
        if g.n > 60:
            raise OracleTooLarge("degree-bounded search handles n <= 60")
        stats = SearchStats(cap=cap)
        lb = _degree_lower_bound(g)
        ub_tree = _bfs_tree(g)
        ub = max(degrees(ub_tree, g.n)) if ub_tree else 0
        for d in range(lb, ub):
            t = bounded_degree_tree(g, d, stats)
            if stats.exhausted:
                return MdstSolution(None, None, "search", stats.nodes)
            if t is not None:
                return MdstSolution(d, t, "search", stats.nodes)
        return MdstSolution(ub, ub_tree, "search", stats.nodes)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- flow network

@dataclass
class FlowNetwork:
    """Capacitated digraph with integer capacities; nodes are hashable."""

    source: object
    sink: object
    cap: dict[tuple, int] = field(default_factory=dict)

    def add(self, a, b, c: int) -> None:
        self.cap[(a, b)] = self.cap.get((a, b), 0) + c

    def nodes(self) -> set:
        return {x for e in self.cap for x in e}

    def to_networkx(self) -> nx.DiGraph:
        G = nx.DiGraph()
        G.add_nodes_from(self.nodes() | {self.source, self.sink})
        for (a, b), c in self.cap.items():
            G.add_edge(a, b, capacity=c)
        return G


def constrained_network(inst: ConstrainedInstance) -> FlowNetwork:
    """s -> bundle (q) -> leaf branch (1) -> Q node (1) -> t (q)."""
    F = FlowNetwork("s", "t")
    q = inst.q
    branches = {inst.branch[u] for u, _ in inst.edges}
    for b in sorted(branches):
        F.cap[("s", ("bundle", inst.bundle[b]))] = q
        F.cap[(("bundle", inst.bundle[b]), ("branch", b))] = 1
    for u, v in inst.edges:
        F.cap[(("branch", inst.branch[u]), ("q", v))] = 1
        F.cap[(("q", v), "t")] = q
    return F


def maxflow(F: FlowNetwork) -> int:
    if not F.cap:
        return 0
    return int(nx.maximum_flow_value(F.to_networkx(), F.source, F.sink))


def min_cut_by_enumeration(F: FlowNetwork, limit: int = 16) -> int:
    inner = sorted(F.nodes() - {F.source, F.sink}, key=repr)
    if len(inner) > limit:
        raise OracleTooLarge(f"{len(inner)} inner nodes > {limit}")
    best = None
    for mask in range(1 << len(inner)):
        side = {F.source} | {x for i, x in enumerate(inner) if mask >> i & 1}
        c = sum(w for (a, b), w in F.cap.items() if a in side and b not in side)
        best = c if best is None else min(best, c)
    return best or 0


def greedy_maximal_flow(F: FlowNetwork, order: Iterable[tuple]) -> int:
    """Saturate the given s-t paths one after another; returns the value.

    Every s-t path of the layered network must appear in ``order`` for the
    result to be a maximal flow.
    """
    res = dict(F.cap)
    value = 0
    for path in order:
        arcs = list(zip(path, path[1:]))
        push = min(res[a] for a in arcs)
        for a in arcs:
            res[a] -= push
        value += push
    return value


def constrained_paths(inst: ConstrainedInstance) -> list[tuple]:
    out = set()
    for u, v in inst.edges:
        b = inst.branch[u]
        out.add(("s", ("bundle", inst.bundle[b]), ("branch", b), ("q", v), "t"))
    return sorted(out, key=repr)


# ---------------------------------------------------------------- matchings

def component_candidates(g: Graph, label) -> list[Edge]:
    return sorted(e for e in g.edges if label[e[0]] != label[e[1]])


def one_d_candidates(g: Graph, label, U, Q) -> list[tuple[int, int]]:
    U, Q = set(U), set(Q)
    out = []
    for a, b in sorted(g.edges):
        for u, v in ((a, b), (b, a)):
            if label[u] in U and v in Q and label[v] not in U:
                out.append((u, v))
    return out


def _feasible(kind: str, chosen: list, e, ctx) -> bool:
    if kind == "component":
        label = ctx["label"]
        used = {label[x] for f in chosen for x in f}
        return label[e[0]] not in used and label[e[1]] not in used
    if kind == "one_d":
        label, d = ctx["label"], ctx["d"]
        if any(label[u] == label[e[0]] for u, _ in chosen):
            return False
        return sum(1 for _, v in chosen if v == e[1]) < d
    inst: ConstrainedInstance = ctx["instance"]
    b = inst.branch[e[0]]
    if any(inst.branch[u] == b for u, _ in chosen) or e in chosen:
        return False
    if sum(1 for u, _ in chosen if inst.bundle[inst.branch[u]] == inst.bundle[b]) >= inst.q:
        return False
    return sum(1 for _, v in chosen if v == e[1]) < inst.q


def all_matchings(kind: str, candidates: list, ctx: Mapping) -> Iterator[tuple[list, bool]]:
    """Every valid matching over ``candidates`` with its maximality flag."""
    if len(candidates) > 16:
        raise OracleTooLarge(f"{len(candidates)} candidate edges > 16")

    def rec(i: int, chosen: list):
        if i == len(candidates):
            maximal = not any(e not in chosen and _feasible(kind, chosen, e, ctx) for e in candidates)
            yield list(chosen), maximal
            return
        e = candidates[i]
        if _feasible(kind, chosen, e, ctx):
            chosen.append(e)
            yield from rec(i + 1, chosen)
            chosen.pop()
        yield from rec(i + 1, chosen)

    yield from rec(0, [])


def exhaustive_maximum(kind: str, candidates: list, ctx: Mapping) -> int:
    return max(len(m) for m, _ in all_matchings(kind, candidates, ctx))


def max_matching_oracle(kind: str, g: Graph | None = None, label=None, U=(), Q=(), d: int = 1,
                        instance: ConstrainedInstance | None = None) -> int:
    """Maximum size by reduction: graph matching on the contracted graph, or
    integer max-flow for the bipartite kinds."""
    if kind == "component":
        H = nx.Graph()
        H.add_edges_from((label[u], label[v]) for u, v in component_candidates(g, label))
        return len(nx.max_weight_matching(H, maxcardinality=True))
    if kind == "one_d":
        F = FlowNetwork("s", "t")
        for u, v in one_d_candidates(g, label, U, Q):
            F.cap[("s", ("c", label[u]))] = 1
            F.cap[(("c", label[u]), ("q", v))] = 1
            F.cap[(("q", v), "t")] = d
        return maxflow(F)
    if kind == "constrained":
        return maxflow(constrained_network(instance))
    raise ValueError(f"unknown matching kind {kind!r}")


# ---------------------------------------------------------------- improvements

def valid_improvements(T, dec, candidates: list[tuple[int, int]], q: int) -> Iterator[list[tuple[int, int]]]:
    """Every edge set over ``candidates`` meeting the swap prerequisites:
    one outgoing edge per branch, no branch both source and destination,
    at most q new edges per node and per bundle."""
    if len(candidates) > 20:
        raise OracleTooLarge(f"{len(candidates)} candidates > 20")
    for k in range(len(candidates) + 1):
        for sub in itertools.combinations(candidates, k):
            br = [dec.branch[u] for u, _ in sub]
            if len(set(br)) != len(br):
                continue
            if set(br) & {dec.branch[v] for _, v in sub}:
                continue
            load: dict[int, int] = {}
            bund: dict[int, int] = {}
            for u, v in sub:
                load[u] = load.get(u, 0) + 1
                load[v] = load.get(v, 0) + 1
                x = dec.bundle[dec.branch[u]]
                bund[x] = bund.get(x, 0) + 1
            if any(c > q for c in load.values()) or any(c > q for c in bund.values()):
                continue
            yield list(sub)
