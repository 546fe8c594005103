"""Graphs, edge sets, partitions, generators and structural queries.

Edges are always stored in canonical form ``(min id, max id)``; every other
module relies on that for tie-breaking.
"""
from __future__ import annotations

import math
import os
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

Edge = tuple[int, int]
EdgeSet = frozenset  # frozenset[Edge], canonical pairs


class GraphError(ValueError):
    """Malformed graph or generator request."""


class DisconnectedGraphError(GraphError):
    pass


def canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def edge_set(edges: Iterable[tuple[int, int]]) -> frozenset[Edge]:
    return frozenset(canon(u, v) for u, v in edges)


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on nodes ``0..n-1``."""

    n: int
    edges: frozenset[Edge]
    adj: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 1:
            raise GraphError("graph needs at least one node")
        seen: set[Edge] = set()
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {(u, v)} has an id outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            e = canon(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            nbrs[u].append(v)
            nbrs[v].append(u)
        adj = tuple(tuple(sorted(x)) for x in nbrs)
        return cls(n, frozenset(seen), adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def max_degree(self) -> int:
        return max(len(a) for a in self.adj)

    @cached_property
    def diameter(self) -> int:
        return _diameter(self)

    def has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self.edges

    def subgraph_adjacency(self, es: Iterable[Edge]) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in es:
            out[u].append(v)
            out[v].append(u)
        return out


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the node set; ``label[u]`` is the smallest id in u's part."""

    label: tuple[int, ...]
    members: Mapping[int, tuple[int, ...]]

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> "Partition":
        labels = list(labels)
        groups: dict[int, list[int]] = {}
        for u, lab in enumerate(labels):
            groups.setdefault(lab, []).append(u)
        relabel = {lab: min(us) for lab, us in groups.items()}
        members = {relabel[lab]: tuple(us) for lab, us in groups.items()}
        return cls(tuple(relabel[lab] for lab in labels), members)

    def __len__(self) -> int:
        return len(self.members)

    def same(self, u: int, v: int) -> bool:
        return self.label[u] == self.label[v]

    def blocks(self) -> list[tuple[int, ...]]:
        return [self.members[k] for k in sorted(self.members)]


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        self.count -= 1
        return True


# ---------------------------------------------------------------- queries

def bfs_distances(adj, src: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def is_connected(g: Graph) -> bool:
    return min(bfs_distances(g.adj, 0)) >= 0


def eccentricity(g: Graph, u: int) -> int:
    dist = bfs_distances(g.adj, u)
    if min(dist) < 0:
        raise DisconnectedGraphError("graph is disconnected")
    return max(dist)


def diameter(g: Graph) -> int:
    """Largest shortest-path distance; cached on the graph."""
    return g.diameter


def _diameter(g: Graph) -> int:
    if g.n > 1 and g.m >= 8 * g.n and g.n <= 4096:
        # dense: grow all balls at once with matrix products
        A = np.zeros((g.n, g.n), dtype=np.float32)
        for u, v in g.edges:
            A[u, v] = A[v, u] = 1
        reach = np.eye(g.n, dtype=np.float32)
        d = 0
        while not reach.all():
            nxt = ((reach + reach @ A) > 0).astype(np.float32)
            if (nxt == reach).all():
                raise DisconnectedGraphError("graph is disconnected")
            reach = nxt
            d += 1
        return d
    return max(eccentricity(g, u) for u in range(g.n))


def components_of(g: Graph, es: Iterable[Edge]) -> Partition:
    uf = UnionFind(g.n)
    for u, v in es:
        if not g.has_edge(u, v):
            raise GraphError(f"edge {(u, v)} is not in the graph")
        uf.union(u, v)
    return Partition.from_labels(uf.find(u) for u in range(g.n))


def is_forest(n: int, es: Iterable[Edge]) -> bool:
    uf = UnionFind(n)
    return all(uf.union(u, v) for u, v in es)


def is_spanning_tree(g: Graph, t: Iterable[Edge]) -> bool:
    t = edge_set(t)
    if len(t) != g.n - 1 or not t <= g.edges:
        return False
    uf = UnionFind(g.n)
    for u, v in t:
        uf.union(u, v)
    return uf.count == 1


def degrees(es: Iterable[Edge], n: int | None = None) -> dict[int, int] | list[int]:
    """Endpoint multiplicities; a list when ``n`` is given, else a dict."""
    if n is not None:
        out = [0] * n
        for u, v in es:
            out[u] += 1
            out[v] += 1
        return out
    cnt: dict[int, int] = {}
    for u, v in es:
        cnt[u] = cnt.get(u, 0) + 1
        cnt[v] = cnt.get(v, 0) + 1
    return cnt


def max_degree(t: Iterable[Edge]) -> int:
    return max(degrees(t).values(), default=0)


# ---------------------------------------------------------------- generators

def _random_tree_edges(n: int, rng: random.Random) -> list[Edge]:
    """Uniform labelled tree via a random Pruefer sequence."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    import heapq

    leaves = [i for i in range(n) if deg[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append(canon(leaf, x))
        deg[x] -= 1
        if deg[x] == 1:
            heapq.heappush(leaves, x)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append(canon(a, b))
    return edges


def _path(n, params, rng):
    return [(i, i + 1) for i in range(n - 1)]


def _cycle(n, params, rng):
    if n < 3:
        return _path(n, params, rng)
    return [(i, (i + 1) % n) for i in range(n)]


def _star(n, params, rng):
    return [(0, i) for i in range(1, n)]


def _complete(n, params, rng):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _grid(n, params, rng):
    rows = params.get("rows") or max(1, math.isqrt(n))
    cols = math.ceil(n / rows)
    edges = []
    for i in range(n):
        r, c = divmod(i, cols)
        if c + 1 < cols and i + 1 < n:
            edges.append((i, i + 1))
        if i + cols < n:
            edges.append((i, i + cols))
    return edges


def _random_connected(n, params, rng):
    p = params.get("p", 0.1)
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    edges = {canon(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    edges.update(_random_tree_edges(n, rng))
    return sorted(edges)


def _tree_plus_chords(n, params, rng):
    k = params.get("k", n // 4)
    tree = set(_random_tree_edges(n, rng))
    room = n * (n - 1) // 2 - len(tree)
    if k > room:
        raise GraphError(f"cannot add {k} chords: only {room} non-tree pairs")
    while k > 0:
        e = canon(*rng.sample(range(n), 2))
        if e not in tree:
            tree.add(e)
            k -= 1
    return sorted(tree)


def _barbell(n, params, rng):
    if n < 2:
        raise GraphError("barbell needs n >= 2")
    a = params.get("clique", max(1, n // 3))
    if 2 * a > n:
        raise GraphError(f"clique size {a} too large for n={n}")
    edges = [(i, j) for i in range(a) for j in range(i + 1, a)]
    edges += [(n - a + i, n - a + j) for i in range(a) for j in range(i + 1, a)]
    edges += [(i, i + 1) for i in range(a - 1, n - a)]
    return edges


def _wheel(n, params, rng):
    edges = _star(n, params, rng)
    rim = list(range(1, n))
    if len(rim) >= 3:
        edges += [(rim[i], rim[(i + 1) % len(rim)]) for i in range(len(rim))]
    elif len(rim) == 2:
        edges.append((1, 2))
    return edges


def _spider(n, params, rng):
    # centre 0 with `legs` paths; with web=True, nodes at equal distance on
    # consecutive legs are joined in a ring
    legs = params.get("legs", max(1, (n - 1) // 3))
    if n < 2 or legs > n - 1:
        raise GraphError(f"cannot build {legs} legs on {n} nodes")
    leg_nodes: list[list[int]] = [[] for _ in range(legs)]
    for i in range(1, n):
        leg_nodes[(i - 1) % legs].append(i)
    edges = []
    for leg in leg_nodes:
        edges.append((0, leg[0]))
        edges += [(leg[j], leg[j + 1]) for j in range(len(leg) - 1)]
    if params.get("web", True) and legs >= 2:
        for lvl in range(max(len(x) for x in leg_nodes)):
            ring = [leg[lvl] for leg in leg_nodes if lvl < len(leg)]
            if len(ring) >= 3:
                edges += [(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]
            elif len(ring) == 2:
                edges.append((ring[0], ring[1]))
    return edges


def _caterpillar(n, params, rng):
    # spine 0..s-1, the other nodes hang round-robin off the spine; with
    # chords=True the hairs of each spine node are chained into a path and
    # the last hair of spine node i is joined to the first hair of node i+1
    s = params.get("spine", max(1, n // 20))
    if s > n:
        raise GraphError("spine longer than n")
    edges = [(i, i + 1) for i in range(s - 1)]
    hairs: list[list[int]] = [[] for _ in range(s)]
    for j, v in enumerate(range(s, n)):
        hairs[j % s].append(v)
        edges.append((j % s, v))
    if params.get("chords", True):
        for i, hs in enumerate(hairs):
            edges += [(hs[j], hs[j + 1]) for j in range(len(hs) - 1)]
            if i + 1 < s and hs and hairs[i + 1]:
                edges.append((hs[-1], hairs[i + 1][0]))
    return edges


GENERATORS = {
    "path": _path,
    "cycle": _cycle,
    "star": _star,
    "complete": _complete,
    "grid": _grid,
    "random-connected": _random_connected,
    "random-tree-plus-chords": _tree_plus_chords,
    "barbell": _barbell,
    "wheel": _wheel,
    "spider": _spider,
    "caterpillar": _caterpillar,
}
GENERATORS["random"] = _random_connected


def generate(kind: str, n: int, params: Mapping | None = None, seed: int = 0) -> Graph:
    """Build a connected test graph, deterministic in (kind, n, params, seed)."""
    if kind not in GENERATORS:
        raise GraphError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    if n < 1:
        raise GraphError("n must be >= 1")
    rng = random.Random(f"{kind}|{n}|{sorted((params or {}).items())}|{seed}")
    g = Graph.from_edges(n, GENERATORS[kind](n, dict(params or {}), rng))
    if not is_connected(g):
        raise DisconnectedGraphError(f"{kind} with n={n}, params={params} is disconnected")
    return g


# ---------------------------------------------------------------- file format

def read_graph(path: str | os.PathLike) -> Graph:
    """Read the plain ``n m`` / ``u v`` edge-list format."""
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise GraphError(f"{path}: first line must be 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"{path}: header says {m} edges, found {len(body)}")
    return Graph.from_edges(n, ((int(a), int(b)) for a, b in body))


def write_graph(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in sorted(g.edges):
            fh.write(f"{u} {v}\n")
