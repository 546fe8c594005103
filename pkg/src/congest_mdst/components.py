"""Component services: the global BFS tree, component views, and the
broadcast / aggregate / merge primitives on top of the round engine.

Each primitive runs for a fixed number of rounds (``r_max``) regardless of
the input, so callers stay in lock-step. ``Network`` is the driver the
algorithms talk to. With ``backend="engine"`` every primitive is executed
as real node programs on the round engine; with ``backend="fast"`` the same
per-component results are computed directly and the same rounds are
charged. The fast backend only counts messages for one-round exchanges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .graph import Edge, Graph, Partition, canon, components_of
from .runtime import (
    BudgetViolation,
    Codec,
    EngineError,
    Interleaved,
    NodeProgram,
    RunMetrics,
    SimConfig,
    define_kind,
    kind_bits,
    run,
)

Msg = tuple[str, tuple]  # (kind, field values)

define_kind("BFS_JOIN", "count", "id?")  # depth, parent
define_kind("BFS_HUP", "count", "id")  # subtree height, parent
define_kind("BFS_HDOWN", "count")  # tree height
define_kind("SAGG_JOIN", "id?")  # parent
define_kind("SAGG_UP", "id", "val?")  # parent, partial
define_kind("SAGG_DOWN", "val?")
define_kind("TOK_UP", "count", "val?")  # token index, partial
define_kind("TOK_DOWN", "count", "val?")
define_kind("LREF", "id")  # large leader id


class InvariantViolation(EngineError):
    pass


def pipelined(kind: str) -> str:
    """The large-component form of a broadcast kind: a leader id in front."""
    from .runtime import _KINDS

    return define_kind(kind + "@L", "id", *_KINDS[kind][1])


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class ComponentView:
    component_id: int
    leader_id: int
    size: int
    is_large: bool


@dataclass(frozen=True)
class GlobalTree:
    root: int
    parent: tuple[int, ...]  # -1 at the root
    depth: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    height: int


@dataclass
class Components:
    """Node-local component knowledge: views, incident forest edges, and the
    sorted list of large leaders every node learned at the last refresh."""

    views: list[ComponentView]
    fadj: list[set[int]]
    large: tuple[int, ...] = ()

    @classmethod
    def singletons(cls, n: int) -> "Components":
        S = math.isqrt(n - 1) + 1 if n > 1 else 1
        views = [ComponentView(u, u, 1, 1 >= S) for u in range(n)]
        return cls(views, [set() for _ in range(n)])

    def leader(self, u: int) -> int:
        return self.views[u].leader_id

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for u, v in enumerate(self.views):
            out.setdefault(v.leader_id, []).append(u)
        return out

    def forest_edges(self) -> set[Edge]:
        return {canon(u, v) for u, nb in enumerate(self.fadj) for v in nb}

    def count(self) -> int:
        return len({v.leader_id for v in self.views})


def ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def check_views(g: Graph, comps: Components) -> Partition:
    """Centralized audit: views agree with the forest's connected components."""
    part = components_of(g, comps.forest_edges())
    S = ceil_sqrt(g.n)
    for root, members in part.members.items():
        v0 = comps.views[members[0]]
        if v0.leader_id not in members:
            raise InvariantViolation(f"leader {v0.leader_id} is outside its component {members[:8]}")
        for u in members:
            v = comps.views[u]
            if v != v0:
                raise InvariantViolation(f"nodes {members[0]} and {u} disagree: {v0} vs {v}")
        if v0.size != len(members):
            raise InvariantViolation(f"component of {v0.leader_id} believes size {v0.size}, has {len(members)}")
        if v0.is_large != (v0.size >= S):
            raise InvariantViolation(f"component of {v0.leader_id} has a wrong large flag")
    if len(part) != comps.count():
        raise InvariantViolation("two forest components share a leader")
    nlarge = sum(1 for ms in part.members.values() if len(ms) >= S)
    if nlarge > S:
        raise InvariantViolation(f"{nlarge} large components exceed ceil(sqrt n) = {S}")
    return part


# ---------------------------------------------------------------- BFS program

class BfsProgram(NodeProgram):
    """JOIN flood from the root, height convergecast, height downcast."""

    def __init__(self, root: int = 0):
        self.root = root

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        self.codec: Codec = params["codec"]
        self.depth = 0 if node == self.root else None
        self.parent = -1
        self.joined = None
        self.children: list[int] = []
        self.child_h: dict[int, int] = {}
        self.sent_up = False
        self.H = 0 if not neighbors else None
        self.done = not neighbors

    def _send(self, kind, *vals):
        return self.codec.encode(self.node, kind, vals)

    def step(self, r, inbox):
        if self.node == self.root and r == 1:
            self.joined = 1
            return self._send("BFS_JOIN", 0, None)
        msgs = [(e.sender, *self.codec.decode(e)) for e in inbox]
        if self.depth is None:
            joins = [(s, v) for s, k, v in msgs if k == "BFS_JOIN"]
            if not joins:
                return None
            self.depth = joins[0][1][0] + 1
            self.parent = min(s for s, _ in joins)
            self.joined = r
            return self._send("BFS_JOIN", self.depth, self.parent)
        for s, k, v in msgs:
            if k == "BFS_JOIN" and v[1] == self.node:
                self.children.append(s)
            elif k == "BFS_HUP" and v[1] == self.node:
                self.child_h[s] = v[0]
            elif k == "BFS_HDOWN" and s == self.parent:
                self.H = v[0]
                self.done = True
                return self._send("BFS_HDOWN", self.H) if self.children else None
        if not self.sent_up and r >= self.joined + 2 and len(self.child_h) == len(self.children):
            self.sent_up = True
            h = 1 + max(self.child_h.values()) if self.children else 0
            if self.node == self.root:
                self.H = h
                self.done = True
                return self._send("BFS_HDOWN", h)
            return self._send("BFS_HUP", h, self.parent)
        return None

    def is_done(self):
        return self.done

    def output(self):
        return (self.parent, self.depth, tuple(sorted(self.children)), self.H)


def build_global_bfs(g: Graph, cfg: SimConfig | None = None, root: int = 0) -> tuple[GlobalTree, RunMetrics]:
    cfg = cfg or SimConfig()
    outs, m = run(g, lambda u: BfsProgram(root), cfg, {"codec": Codec(g.n)}, label="bfs")
    parent, depth, children, hs = zip(*outs)
    if len(set(hs)) != 1:
        raise InvariantViolation(f"nodes disagree on the tree height: {sorted(set(hs))}")
    return GlobalTree(root, tuple(parent), tuple(depth), tuple(children), hs[0]), m


def bfs_reference(g: Graph, root: int = 0) -> GlobalTree:
    """Centralized BFS with the same min-id parent rule as the program."""
    from .graph import bfs_distances

    depth = bfs_distances(g.adj, root)
    parent = [-1] * g.n
    children: list[list[int]] = [[] for _ in range(g.n)]
    for u in range(g.n):
        if u != root:
            parent[u] = min(v for v in g.adj[u] if depth[v] == depth[u] - 1)
            children[parent[u]].append(u)
    return GlobalTree(root, tuple(parent), tuple(depth), tuple(tuple(c) for c in children), max(depth))


# ---------------------------------------------------------------- primitive programs

class SmallFlood(NodeProgram):
    """Flood one message through a small component over forest edges."""

    def __init__(self, active: bool, fnbrs: set[int], msg: Msg | None, S: int):
        self.active, self.fnbrs, self.got, self.S = active, fnbrs, msg, S
        self.finished = not active

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        self.codec = params["codec"]

    def step(self, r, inbox):
        if r >= self.S:
            self.finished = True
        if r == 1 and self.got is not None:
            self.finished = True
            return self.codec.encode(self.node, self.got[0], self.got[1])
        if self.got is None:
            cands = [e for e in inbox if e.sender in self.fnbrs]
            if cands:
                self.got = self.codec.decode(min(cands, key=lambda e: e.sender))
                self.finished = True
                return self.codec.encode(self.node, *self.got)
        return None

    def is_done(self):
        return self.finished

    def output(self):
        return self.got


class LargePipeline(NodeProgram):
    """Pipelined upcast of per-leader messages to the tree root, then a
    pipelined downcast to everyone. In refresh mode the messages are the
    large leaders' own ids and every node keeps the full list."""

    def __init__(self, tree: GlobalTree, u: int, m: int, own: Msg | None,
                 my_leader: int | None, refresh: bool = False):
        self.parent = tree.parent[u]
        self.depth = tree.depth[u]
        self.kids = set(tree.children[u])
        self.H, self.m = tree.height, m
        self.my_leader, self.refresh = my_leader, refresh
        self.known: dict[int, Msg] = {}
        if own is not None:
            self.known[my_leader] = own
        self.sent: set[int] = set()
        self.down: list = []
        self.result: Msg | None = None
        self.end = self.H + self.m + 1 + self.m + self.depth
        self._r = 0

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        self.codec = params["codec"]

    def _enc(self, leader, msg):
        if self.refresh:
            return self.codec.encode(self.node, "LREF", (leader,))
        return self.codec.encode(self.node, pipelined(msg[0]), (leader, *msg[1]))

    def _dec(self, env):
        kind, vals = self.codec.decode(env)
        if self.refresh:
            return vals[0], ("LREF", ())
        return vals[0], (kind[:-2], vals[1:])

    def step(self, r, inbox):
        self._r = r
        up_end = self.H + self.m
        if r <= up_end + 1:
            for e in sorted(inbox, key=lambda e: e.sender):
                if e.sender in self.kids:
                    leader, msg = self._dec(e)
                    self.known.setdefault(leader, msg)
            if r <= up_end and self.parent >= 0:
                todo = sorted(set(self.known) - self.sent)
                if todo:
                    self.sent.add(todo[0])
                    return self._enc(todo[0], self.known[todo[0]])
            if self.parent < 0 and r == up_end + 1:
                self.order = sorted(self.known)
                for leader in self.order:
                    self._deliver(leader, self.known[leader])
            return None
        if self.parent < 0:
            i = r - (up_end + 2)
            if 0 <= i < len(self.order) and self.kids:
                return self._enc(self.order[i], self.known[self.order[i]])
            return None
        for e in inbox:
            if e.sender == self.parent:
                leader, msg = self._dec(e)
                self._deliver(leader, msg)
                if self.kids:
                    return self._enc(leader, msg)
        return None

    def _deliver(self, leader, msg):
        if self.refresh:
            self.down.append(leader)
        elif leader == self.my_leader:
            self.result = msg

    def is_done(self):
        return self.m == 0 or self._r >= self.end

    def output(self):
        return tuple(self.down) if self.refresh else self.result


def _combine(op: str, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b) if op == "max" else a + b


class SmallAggregate(NodeProgram):
    """Leader-rooted BFS inside a small component, convergecast, downcast."""

    def __init__(self, active: bool, is_leader: bool, fnbrs: set[int], value, op: str, S: int):
        self.active, self.is_leader, self.fnbrs = active, is_leader, fnbrs
        self.acc, self.op, self.S = value, op, S
        self.depth = 0 if is_leader else None
        self.parent = None
        self.children: set[int] = set()
        self.result = None
        self.finished = not active or (is_leader and not fnbrs)
        if is_leader and not fnbrs:
            self.result = value

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        self.codec = params["codec"]

    def step(self, r, inbox):
        S = self.S
        msgs = [(e.sender, *self.codec.decode(e)) for e in inbox if e.sender in self.fnbrs]
        for s, k, v in msgs:
            if k == "SAGG_JOIN" and v[0] == self.node:
                self.children.add(s)
            elif k == "SAGG_UP" and v[0] == self.node:
                self.acc = _combine(self.op, self.acc, v[1])
        if self.is_leader:
            if r == 1:
                return self.codec.encode(self.node, "SAGG_JOIN", (None,))
            if r == 2 * S + 1:
                self.result = self.acc
                self.finished = True
                return self.codec.encode(self.node, "SAGG_DOWN", (self.acc,))
            return None
        if self.depth is None:
            joins = [s for s, k, _ in msgs if k == "SAGG_JOIN"]
            if joins:
                self.depth = r - 1
                self.parent = min(joins)
                return self.codec.encode(self.node, "SAGG_JOIN", (self.parent,))
            return None
        if r == 2 * S - self.depth:
            return self.codec.encode(self.node, "SAGG_UP", (self.parent, self.acc))
        if r > 2 * S - self.depth:
            for s, k, v in msgs:
                if k == "SAGG_DOWN" and s == self.parent:
                    self.result = v[0]
                    self.finished = True
                    if self.children:
                        return self.codec.encode(self.node, "SAGG_DOWN", (v[0],))
        return None

    def is_done(self):
        return self.finished

    def output(self):
        return self.result


class TokenAggregate(NodeProgram):
    """Synchronized convergecast of t tokens over the global tree.

    A node at depth ``dep`` sends token k at step k + H - dep, which is the
    same schedule as padding every leaf with virtual descendants down to
    depth H. The root then pipelines the t results back down.
    """

    def __init__(self, tree: GlobalTree, u: int, t: int, own: Mapping[int, int], want: set[int], op: str):
        self.parent = tree.parent[u]
        self.depth = tree.depth[u]
        self.kids = set(tree.children[u])
        self.H, self.t = tree.height, t
        self.own, self.want, self.op = dict(own), want, op
        self.results: dict[int, int | None] = {k: None for k in want}
        self.end = self.H + 2 * t + self.depth
        self._r = 0

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        self.codec = params["codec"]

    def step(self, r, inbox):
        self._r = r
        H, t = self.H, self.t
        if r <= H + t:
            k = r - (H - self.depth)
            part = self.own.get(k)
            for e in inbox:
                if e.sender in self.kids:
                    _, (kk, val) = self.codec.decode(e)
                    if kk != k:
                        raise EngineError(f"token {kk} arrived in the slot of token {k}")
                    part = _combine(self.op, part, val)
            if not 1 <= k <= t:
                return None
            if self.parent < 0:
                self.own[k] = part
                if k in self.want:
                    self.results[k] = part
                return None
            if part is None:
                return None
            return self.codec.encode(self.node, "TOK_UP", (k, part))
        if self.parent < 0:
            k = r - (H + t)
            if 1 <= k <= t and self.kids and self.own.get(k) is not None:
                return self.codec.encode(self.node, "TOK_DOWN", (k, self.own[k]))
            return None
        for e in inbox:
            if e.sender == self.parent:
                _, (k, val) = self.codec.decode(e)
                if k in self.want:
                    self.results[k] = val
                if self.kids:
                    return self.codec.encode(self.node, "TOK_DOWN", (k, val))
        return None

    def is_done(self):
        return self.t == 0 or self._r >= self.end

    def output(self):
        return self.results


class ExchangeProgram(NodeProgram):
    def __init__(self, msg: Msg | None):
        self.msg = msg
        self.got: list = []
        self.finished = False

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        self.codec = params["codec"]

    def step(self, r, inbox):
        if r == 1:
            if self.msg is not None:
                return self.codec.encode(self.node, *self.msg)
            return None
        self.got = [(e.sender, *self.codec.decode(e)) for e in sorted(inbox, key=lambda e: e.sender)]
        self.finished = True
        return None

    def is_done(self):
        return self.finished

    def output(self):
        return self.got


# ---------------------------------------------------------------- network driver

@dataclass
class Network:
    """Round-charging driver shared by every distributed algorithm here."""

    g: Graph
    cfg: SimConfig = field(default_factory=SimConfig)
    backend: str = "fast"

    def __post_init__(self):
        if self.backend not in ("fast", "engine"):
            raise ValueError(f"unknown backend {self.backend!r}")
        n = self.g.n
        self.n = n
        self.S = ceil_sqrt(n)
        self.codec = Codec(n)
        self.budget = self.cfg.budget_bits(n)
        self.metrics = RunMetrics()
        self.round = 0
        self.tree, bm = build_global_bfs(self.g, self.cfg)
        self._absorb(bm)
        self.charge("bfs", bm.rounds_executed)
        self.H = self.tree.height
        self.r_max = 2 * (3 * (self.H + self.S) + 16)
        self.comps = Components.singletons(n)

    # -- accounting
    def charge(self, label: str, rounds: int) -> None:
        self.round += rounds
        self.metrics.charge(label, rounds)

    def idle(self, rounds: int, label: str = "idle") -> None:
        """Charge rounds in which every node provably has nothing to send."""
        self.charge(label, rounds)

    def _absorb(self, m: RunMetrics) -> None:
        self.metrics.messages_sent += m.messages_sent
        self.metrics.max_declared_bits = max(self.metrics.max_declared_bits, m.max_declared_bits)
        self.metrics.budget_violations += m.budget_violations

    def _note_bits(self, kinds: Iterable[str], sender: int = -1) -> None:
        for k in kinds:
            bits = kind_bits(k, self.n)
            if bits > self.budget:
                if self.cfg.strict_budget:
                    raise BudgetViolation(sender, self.round + 1, bits, self.budget)
                self.metrics.budget_violations += 1
            self.metrics.max_declared_bits = max(self.metrics.max_declared_bits, bits)

    def _engine(self, factory, label: str, limit: int) -> list:
        outs, m = run(self.g, factory, self.cfg, {"codec": self.codec}, label=label,
                      round_offset=self.round, max_rounds=limit + 8)
        if m.rounds_executed > limit:
            raise EngineError(f"{label} used {m.rounds_executed} rounds, budget {limit}")
        self.last_engine_rounds = m.rounds_executed
        self._absorb(m)
        return outs

    # -- primitives
    def exchange(self, msgs: Mapping[int, Msg], label: str = "exchange") -> list[list[tuple]]:
        """One round: each node in ``msgs`` broadcasts to all neighbours.

        Returns, per node, the received ``(sender, kind, values)`` sorted by sender."""
        if self.backend == "engine":
            outs = self._engine(lambda u: ExchangeProgram(msgs.get(u)), label, 1)
        else:
            outs = [[] for _ in range(self.n)]
            for u in sorted(msgs):
                kind, vals = msgs[u]
                self.codec.check(kind, vals)
                for v in self.g.adj[u]:
                    outs[v].append((u, kind, tuple(vals)))
            self.metrics.messages_sent += len(msgs)
            self._note_bits({k for k, _ in msgs.values()})
        self.charge(label, 1)
        return outs

    def broadcast(self, sources: Mapping[int, Msg], comps: Components | None = None,
                  label: str = "broadcast") -> list[Msg | None]:
        """Deliver each component's source message to all its members."""
        comps = comps or self.comps
        if self.backend == "engine":
            outs = self._broadcast_engine(sources, comps, label)
        else:
            pick: dict[int, Msg] = {}
            for u in sorted(sources):
                kind, vals = sources[u]
                self.codec.check(kind, vals)
                pick.setdefault(comps.leader(u), (kind, tuple(vals)))
            outs = [pick.get(comps.leader(u)) for u in range(self.n)]
            kinds = {k for k, _ in sources.values()}
            self._note_bits(kinds | {pipelined(k) for k in kinds if comps.large})
        self.charge(label, self.r_max)
        return outs

    def _broadcast_engine(self, sources, comps, label):
        tree, S = self.tree, self.S
        m = len(comps.large)

        def factory(u):
            view = comps.views[u]
            small = SmallFlood(not view.is_large, comps.fadj[u], sources.get(u), S)
            large = LargePipeline(tree, u, m, sources.get(u) if view.is_large else None,
                                  view.leader_id if view.is_large else None)
            return Interleaved([small, large], [0, 1])

        outs = self._engine(factory, label, self.r_max)
        return [o[1] if comps.views[u].is_large else o[0] for u, o in enumerate(outs)]

    def aggregate(self, values: Mapping[int, int], op: str = "max", comps: Components | None = None,
                  label: str = "aggregate") -> list[int | None]:
        """Per node, op over the values held in its component (None if none)."""
        if op not in ("max", "sum"):
            raise ValueError(f"unknown op {op!r}")
        comps = comps or self.comps
        for u, x in values.items():
            self.codec.check("SAGG_DOWN", (x,))
        if self.backend == "engine":
            outs = self._aggregate_engine(values, op, comps, label)
        else:
            acc: dict[int, int] = {}
            for u in sorted(values):
                lead = comps.leader(u)
                acc[lead] = _combine(op, acc.get(lead), values[u])
            outs = [acc.get(comps.leader(u)) for u in range(self.n)]
            self._note_bits(("SAGG_JOIN", "SAGG_UP", "SAGG_DOWN", "TOK_UP", "TOK_DOWN"))
        if op == "sum":
            outs = [0 if x is None else x for x in outs]
        self.charge(label, self.r_max)
        return outs

    def _aggregate_engine(self, values, op, comps, label):
        tree, S = self.tree, self.S
        index = {lead: i + 1 for i, lead in enumerate(comps.large)}
        t = len(index)

        def factory(u):
            view = comps.views[u]
            small = SmallAggregate(not view.is_large, view.leader_id == u, comps.fadj[u],
                                   values.get(u), op, S)
            if view.is_large:
                k = index[view.leader_id]
                own = {k: values[u]} if u in values else {}
                large = TokenAggregate(tree, u, t, own, {k}, op)
            else:
                large = TokenAggregate(tree, u, t, {}, set(), op)
            return Interleaved([small, large], [0, 1])

        outs = self._engine(factory, label, self.r_max)
        res = []
        for u, (s_out, l_out) in enumerate(outs):
            view = comps.views[u]
            res.append(l_out[index[view.leader_id]] if view.is_large else s_out)
        return res

    def global_aggregate(self, vectors: Mapping[int, Sequence[int]], t: int, op: str = "sum",
                         label: str = "global") -> list[int]:
        """Element-wise op over every node's length-t vector, known to all."""
        if self.backend == "engine":
            def factory(u):
                vec = vectors.get(u, ())
                own = {k + 1: x for k, x in enumerate(vec) if x is not None}
                return TokenAggregate(self.tree, u, t, own, set(range(1, t + 1)), op)

            outs = self._engine(factory, label, 2 * (self.H + t) + 2)
            res = [outs[0][k] for k in range(1, t + 1)]
            if any(o != outs[0] for o in outs):
                raise InvariantViolation("nodes disagree on a global aggregate")
        else:
            res = [None] * t
            for u in sorted(vectors):
                for k, x in enumerate(vectors[u]):
                    self.codec.check("TOK_UP", (k + 1, x))
                    res[k] = _combine(op, res[k], x)
            self._note_bits(("TOK_UP", "TOK_DOWN"))
        self.charge(label, 2 * (self.H + t) + 2)
        ident = 0 if op == "sum" else None
        return [ident if x is None else x for x in res]

    def refresh_large(self, comps: Components | None = None, label: str = "refresh") -> tuple[int, ...]:
        """Tell every node the sorted ids of all large components' leaders."""
        comps = comps or self.comps
        truth = tuple(sorted({v.leader_id for v in comps.views if v.is_large}))
        if len(truth) > self.S:
            raise InvariantViolation(f"{len(truth)} large components exceed {self.S}")
        if self.backend == "engine":
            def factory(u):
                v = comps.views[u]
                lead = v.is_large and v.leader_id == u
                return LargePipeline(self.tree, u, self.S, ("LREF", ()) if lead else None,
                                     u if lead else None, refresh=True)

            outs = self._engine(factory, label, self.r_max)
            if any(o != truth for o in outs):
                raise InvariantViolation("large leader lists disagree after refresh")
        else:
            self._note_bits(("LREF",))
        comps.large = truth
        self.charge(label, self.r_max)
        return truth


# ---------------------------------------------------------------- merge

define_kind("MRG_INFO", "id", "count")  # leader, size across an M edge
define_kind("MRG_SAT", "count")  # satellite size to its center
define_kind("MRG_TOT", "count")  # satellite total across an M edge
define_kind("MRG_NEW", "id", "count")  # new leader, new size


def component_merge(net: Network, M: Iterable[Edge], Mp: Iterable[tuple[int, int]],
                    comps: Components | None = None) -> Components:
    """Merge along component-matching edges M and star edges Mp.

    ``Mp`` holds oriented pairs (satellite endpoint, center endpoint). The
    larger leader wins across an M edge; satellites adopt their center's
    leader. Views are updated in place and returned.
    """
    comps = comps or net.comps
    n = net.n
    M = [canon(*e) for e in M]
    Mp = [(int(a), int(b)) for a, b in Mp]
    m_partner: dict[int, int] = {}
    for u, v in M:
        if comps.leader(u) == comps.leader(v):
            raise InvariantViolation(f"M edge {(u, v)} lies inside one component")
        for x, y in ((u, v), (v, u)):
            if x in m_partner:
                raise InvariantViolation(f"node {x} is an endpoint of two M edges")
            m_partner[x] = y
    m_leaders = {comps.leader(x) for x in m_partner}
    if len(m_leaders) != len(m_partner):
        raise InvariantViolation("a component has two M edges")
    sat_of: dict[int, int] = {}
    sats_at: dict[int, list[int]] = {}
    sat_leaders: set[int] = set()
    for s, c in Mp:
        if comps.leader(s) in m_leaders:
            raise InvariantViolation(f"component of {s} has both an M edge and a star edge")
        if comps.leader(s) in sat_leaders:
            raise InvariantViolation(f"component of {s} has two star edges")
        sat_of[s] = c
        sat_leaders.add(comps.leader(s))
        sats_at.setdefault(c, []).append(s)
    for c in sats_at:
        if comps.leader(c) in sat_leaders:
            raise InvariantViolation(f"node {c} is a center inside a satellite component")

    views = comps.views
    # (a) sizes across M edges and from satellites to centers
    msgs: dict[int, Msg] = {}
    for x in m_partner:
        msgs[x] = ("MRG_INFO", (views[x].leader_id, views[x].size))
    for s in sat_of:
        msgs[s] = ("MRG_SAT", (views[s].size,))
    inbox = net.exchange(msgs, "merge")
    other: dict[int, tuple[int, int]] = {}
    sat_sum: dict[int, int] = {}
    for x in range(n):
        for s, k, vals in inbox[x]:
            if k == "MRG_INFO" and m_partner.get(x) == s:
                other[x] = vals
            elif k == "MRG_SAT" and sat_of.get(s) == x:
                sat_sum[x] = sat_sum.get(x, 0) + vals[0]
    # (b) satellite total per center component
    tot = net.aggregate(sat_sum, "sum", comps, "merge")
    # (c) satellite totals across M edges
    inbox = net.exchange({x: ("MRG_TOT", (tot[x],)) for x in m_partner}, "merge")
    other_tot = {x: vals[0] for x in range(n) for s, k, vals in inbox[x]
                 if k == "MRG_TOT" and m_partner.get(x) == s}
    # (d) new leader and size inside each M-matched component
    src = {}
    for x in m_partner:
        lead = max(views[x].leader_id, other[x][0])
        src[x] = ("MRG_NEW", (lead, views[x].size + other[x][1] + tot[x] + other_tot[x]))
    got = net.broadcast(src, comps, "merge")
    new_lead = [views[u].leader_id for u in range(n)]
    new_size = [views[u].size for u in range(n)]
    for u in range(n):
        if got[u] is not None:
            new_lead[u], new_size[u] = got[u][1]
        elif tot[u]:
            new_size[u] = views[u].size + tot[u]
    # (e) centers tell their satellites
    inbox = net.exchange({c: ("MRG_NEW", (new_lead[c], new_size[c])) for c in sats_at}, "merge")
    src = {}
    for s in sat_of:
        for snd, k, vals in inbox[s]:
            if k == "MRG_NEW" and snd == sat_of[s]:
                src[s] = ("MRG_NEW", vals)
    # (f) satellites spread it through their components
    got = net.broadcast(src, comps, "merge")
    for u in range(n):
        if got[u] is not None and comps.leader(u) in sat_leaders:
            new_lead[u], new_size[u] = got[u][1]
    S = net.S
    comps.views = [ComponentView(new_lead[u], new_lead[u], new_size[u], new_size[u] >= S)
                   for u in range(n)]
    for u, v in M:
        comps.fadj[u].add(v)
        comps.fadj[v].add(u)
    for s, c in Mp:
        comps.fadj[s].add(c)
        comps.fadj[c].add(s)
    # (g) everyone learns the new large leaders
    net.refresh_large(comps, "merge")
    return comps
