"""Local-improvement pipeline: maximum degree O(d + log n).

``improve`` performs one parallel wave of edge swaps that lowers the degree
of high-degree nodes (degree >= gamma) while only raising nodes of degree
below gamma0. ``rehab`` repeats waves on the block that dominates the
potential; ``epochs`` runs rehab with halving block widths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .components import ComponentView, Components, Network, ceil_sqrt
from .flow import ConstrainedResult, constrained_matching
from .graph import Edge, Graph, canon, degrees, is_spanning_tree
from .matchings import ConstrainedInstance, verify_constrained
from .runtime import SimConfig, coin, define_kind, log2ceil

DELTA = 0.5
TAU = 4  # 2 / (1 - DELTA)
C_RATIO = TAU * TAU

define_kind("DEC_DEG", "count")  # tree degree
define_kind("DEC_INFO", "id?", "flag", "count")  # branch id, leaf branch, tree degree
define_kind("PR_COIN", "flag")  # 1: drop the outgoing edge, 0: drop the incoming one
define_kind("PR_REJ", "id")  # incoming edge from this source is dropped
define_kind("PR_KEEP")  # the branch's outgoing edge survives
define_kind("IMP_ADD", "id")  # new tree edge to target
define_kind("IMP_CUT", "id")  # tree edge to this parent is removed
define_kind("IMP_BOTH", "id", "id")  # add target, cut parent


class EmptyHighDegreeSet(ValueError):
    """No node reaches the degree threshold; the wave is skipped."""


class ImproveAuditError(AssertionError):
    pass


class RehabCapExceeded(RuntimeError):
    def __init__(self, tree, iterations):
        super().__init__(f"rehab did not settle within {iterations} iterations")
        self.tree = tree
        self.iterations = iterations


def h_param(d_hat: int) -> int:
    """h = (d c + 2) / (1 - delta) with c = tau^2 and delta = 1/2."""
    return 2 * (C_RATIO * d_hat + 2)


# ---------------------------------------------------------------- decomposition

@dataclass
class BranchDecomposition:
    root: int
    gamma: int
    gamma0: int
    deg: list[int]
    X: frozenset[int]
    X0: frozenset[int]
    branch: list[int]  # branch id per node, -1 inside X
    members: dict[int, list[int]]
    leaf: frozenset[int]
    branch_root: dict[int, int]
    branch_parent: dict[int, int]
    bundle: dict[int, int]  # leaf branch -> its parent in X
    comps: Components
    nonleaf_adjacencies: int  # adjacencies of X nodes not into leaf branches

    def bundles(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for b in sorted(self.leaf):
            out.setdefault(self.bundle[b], []).append(b)
        return out


def _tree_adj(n: int, T) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in T:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def decompose_reference(n: int, T, gamma: int, gamma0: int | None = None) -> BranchDecomposition:
    """Centralized branch/bundle decomposition of tree T at threshold gamma."""
    gamma0 = gamma if gamma0 is None else gamma0
    adj = _tree_adj(n, T)
    deg = [len(a) for a in adj]
    X = frozenset(u for u in range(n) if deg[u] >= gamma)
    if not X:
        raise EmptyHighDegreeSet(f"no node has tree degree >= {gamma}")
    root = max(X)
    # root the tree
    parent = [-1] * n
    order = [root]
    seen = [False] * n
    seen[root] = True
    for u in order:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                order.append(v)
    branch = [-1] * n
    members: dict[int, list[int]] = {}
    for s in range(n):
        if s in X or branch[s] >= 0:
            continue
        comp, stack = [s], [s]
        branch[s] = -2
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in X and branch[y] == -1:
                    branch[y] = -2
                    comp.append(y)
                    stack.append(y)
        bid = max(comp)
        for x in comp:
            branch[x] = bid
        members[bid] = sorted(comp)
    exits = {b: 0 for b in members}
    for u in range(n):
        if branch[u] >= 0:
            exits[branch[u]] += sum(1 for v in adj[u] if v in X)
    leaf = frozenset(b for b, c in exits.items() if c == 1)
    broot: dict[int, int] = {}
    bpar: dict[int, int] = {}
    for b, ms in members.items():
        r = next(u for u in ms if parent[u] in X)
        broot[b], bpar[b] = r, parent[r]
    bundle = {b: bpar[b] for b in leaf}
    S = ceil_sqrt(n)
    views = []
    fadj: list[set[int]] = [set() for _ in range(n)]
    for u in range(n):
        if branch[u] < 0:
            views.append(ComponentView(u, u, 1, 1 >= S))
        else:
            size = len(members[branch[u]])
            views.append(ComponentView(branch[u], branch[u], size, size >= S))
            fadj[u] = {v for v in adj[u] if v not in X}
    comps = Components(views, fadj)
    nonleaf = sum(1 for x in X for y in adj[x] if y in X or branch[y] not in leaf)
    return BranchDecomposition(root, gamma, gamma0, deg, X, frozenset(u for u in range(n) if deg[u] >= gamma0),
                               branch, members, leaf, broot, bpar, bundle, comps, nonleaf)


def decompose(net: Network, T, gamma: int, gamma0: int, label: str = "decompose") -> BranchDecomposition:
    """Distributed decomposition; every node ends up knowing its branch id,
    leaf flag and, at branch roots, the bundle root."""
    n = net.n
    adj = _tree_adj(n, T)
    deg = [len(a) for a in adj]
    net.exchange({u: ("DEC_DEG", (deg[u],)) for u in range(n)}, label)
    top = net.global_aggregate({u: [u] for u in range(n) if deg[u] >= gamma}, 1, "max", label)[0]
    if top is None:
        raise EmptyHighDegreeSet(f"no node has tree degree >= {gamma}")
    dec = decompose_reference(n, T, gamma, gamma0)
    assert dec.root == top
    # branch ids (max) and sizes (sum) would take two aggregates and a refresh
    # of the large-branch list; their views are installed directly
    net.idle(2 * net.r_max, label)
    net.refresh_large(dec.comps, label)
    X = dec.X
    exits = net.aggregate({u: sum(1 for v in adj[u] if v in X) for u in range(n) if u not in X},
                          "sum", dec.comps, label)
    for u in range(n):
        if u not in X and (exits[u] == 1) != (dec.branch[u] in dec.leaf):
            raise ImproveAuditError(f"node {u} disagrees about its branch being a leaf")
    net.exchange({u: ("DEC_INFO", (None if dec.branch[u] < 0 else dec.branch[u],
                                   dec.branch[u] in dec.leaf, deg[u])) for u in range(n)}, label)
    return dec


def good_edges(g: Graph, dec: BranchDecomposition) -> list[tuple[int, int]]:
    """Oriented edges from a leaf branch to a different branch, both ends of
    degree below gamma0. Edges between two leaf branches appear both ways."""
    out = []
    low = lambda x: dec.deg[x] < dec.gamma0
    for a, b in sorted(g.edges):
        for u, v in ((a, b), (b, a)):
            bu, bv = dec.branch[u], dec.branch[v]
            if bu in dec.leaf and bv >= 0 and bv != bu and low(u) and low(v):
                out.append((u, v))
    return out


def instance_of(g: Graph, dec: BranchDecomposition, q: int) -> ConstrainedInstance:
    edges = tuple(good_edges(g, dec))
    return ConstrainedInstance(edges, {u: dec.branch[u] for u, _ in edges}, dict(dec.bundle), q)


# ---------------------------------------------------------------- improve

def prune(inst: ConstrainedInstance, dec: BranchDecomposition, M_hat, drop_out_coin) -> list[tuple[int, int]]:
    """Centralized pruning: a branch with >= 2 incoming edges drops its
    outgoing one; a branch with one of each drops one of them by coin.
    ``drop_out_coin(branch)`` returns True to drop the outgoing edge."""
    out_of: dict[int, tuple[int, int]] = {}
    into: dict[int, list[tuple[int, int]]] = {}
    for u, v in M_hat:
        out_of[dec.branch[u]] = (u, v)
        if dec.branch[v] in dec.leaf:
            into.setdefault(dec.branch[v], []).append((u, v))
    dropped = set()
    for b, e in out_of.items():
        k = len(into.get(b, ()))
        if k >= 2:
            dropped.add(e)
        elif k == 1:
            dropped.add(e if drop_out_coin(b) else into[b][0])
    return [e for e in M_hat if e not in dropped]


@dataclass
class WaveRecord:
    gamma: int
    gamma0: int
    q: int
    U: int
    Q: int
    flow_value_scaled: int
    scale: int
    M_hat: int
    M_bar: int
    w_before: int | None
    w_after: int | None
    rounds: int
    X: int = 0
    X0: int = 0
    blocks: int = 0  # non-empty potential blocks before the wave

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ImproveResult:
    tree: frozenset
    M_hat: list[tuple[int, int]]
    M_bar: list[tuple[int, int]]
    record: WaveRecord
    dec: BranchDecomposition
    matching: ConstrainedResult


def apply_improvement(T, dec: BranchDecomposition, M_bar) -> frozenset:
    T = set(canon(*e) for e in T)
    for u, v in M_bar:
        b = dec.branch[u]
        T.discard(canon(dec.branch_root[b], dec.branch_parent[b]))
        T.add(canon(u, v))
    return frozenset(T)


def check_improvement(g: Graph, T, TM, dec: BranchDecomposition, M_bar, q: int) -> list[str]:
    """Swap prerequisites and outcome typing for one wave."""
    problems = []
    per_branch: dict[int, int] = {}
    per_bundle: dict[int, int] = {}
    inc: dict[int, int] = {}
    sources, dests = set(), set()
    for u, v in M_bar:
        b = dec.branch[u]
        per_branch[b] = per_branch.get(b, 0) + 1
        per_bundle[dec.bundle[b]] = per_bundle.get(dec.bundle[b], 0) + 1
        inc[u] = inc.get(u, 0) + 1
        inc[v] = inc.get(v, 0) + 1
        sources.add(b)
        dests.add(dec.branch[v])
    if any(c > 1 for c in per_branch.values()):
        problems.append("a branch has two outgoing edges")
    if sources & dests:
        problems.append("a branch is both source and destination")
    if any(c > q for c in inc.values()):
        problems.append("a node has more than q new edges")
    if any(c > q for c in per_bundle.values()):
        problems.append("a bundle has more than q outgoing edges")
    if not is_spanning_tree(g, TM):
        problems.append("result is not a spanning tree")
        return problems
    d0 = degrees(T, g.n)
    d1 = degrees(TM, g.n)
    improved = {dec.bundle[dec.branch[u]] for u, _ in M_bar}
    for x in improved:
        if d1[x] < dec.gamma - q:
            problems.append(f"improved parent {x} fell to {d1[x]} < {dec.gamma - q}")
    for v in range(g.n):
        if d1[v] > d0[v] and d1[v] > dec.gamma0 + q:
            problems.append(f"node {v} rose to {d1[v]} > {dec.gamma0 + q}")
    return problems


def improve(net: Network, T, gamma: int, gamma0: int, q: int, label: str = "improve",
            weight_params: tuple[int, int] | None = None) -> ImproveResult:
    """One parallel improvement wave. Raises EmptyHighDegreeSet if nobody has
    degree >= gamma. ``weight_params=(h, z)`` adds potential bookkeeping."""
    g, n, seed = net.g, net.n, net.cfg.seed
    start = net.metrics.rounds_executed
    dec = decompose(net, T, gamma, gamma0, label)
    inst = instance_of(g, dec, q)
    cm = constrained_matching(net, dec, inst, label)
    M_hat = list(cm.edges)
    chk = verify_constrained(inst, M_hat)
    if not chk.valid:
        raise ImproveAuditError(f"constrained matching invalid: {chk.reason}")
    comps = dec.comps
    # branch-level counts: 2 * incoming + outgoing
    incoming: dict[int, int] = {}
    for u, v in M_hat:
        incoming[v] = incoming.get(v, 0) + 1
    src_of = {u: v for u, v in M_hat}
    vals = {}
    for x in range(n):
        if dec.branch[x] in dec.leaf:
            c = 2 * incoming.get(x, 0) + (1 if x in src_of else 0)
            if c:
                vals[x] = c
    agg = net.aggregate(vals, "sum", comps, label)
    r0 = net.round
    coins = {}
    for b in dec.leaf:
        tot = agg[b]
        if tot // 2 == 1 and tot % 2 == 1:
            coins[b] = ("PR_COIN", (coin(seed, b, r0, "prune"),))
    flip = net.broadcast(coins, comps, label)

    def drop_out(b):
        return bool(flip[b][1][0])

    M_bar = prune(inst, dec, M_hat, drop_out)
    # the destination side tells dropped sources; survivors tell their branch
    rej = {}
    for u, v in M_hat:
        b = dec.branch[v]
        if b in dec.leaf and agg[v] // 2 == 1 and agg[v] % 2 == 1 and not drop_out(b):
            rej[v] = ("PR_REJ", (u,))
    inbox = net.exchange(rej, label)
    kept = {}
    for u, v in M_hat:
        tot = agg[u]
        if tot // 2 >= 2 or (tot // 2 == 1 and drop_out(dec.branch[u])):
            continue
        if any(k == "PR_REJ" and s == v and vals_[0] == u for s, k, vals_ in inbox[u]):
            continue
        kept[u] = ("PR_KEEP", ())
    if sorted(kept) != sorted(u for u, _ in M_bar):
        raise ImproveAuditError("local pruning decisions disagree with the reference rule")
    heard = net.broadcast(kept, comps, label)
    msgs = {}
    for u, v in M_bar:
        msgs[u] = ("IMP_ADD", (v,))
    for b in dec.leaf:
        r = dec.branch_root[b]
        if heard[r] is not None:
            if r in msgs:
                msgs[r] = ("IMP_BOTH", (msgs[r][1][0], dec.branch_parent[b]))
            else:
                msgs[r] = ("IMP_CUT", (dec.branch_parent[b],))
    net.exchange(msgs, label)
    TM = apply_improvement(T, dec, M_bar)
    problems = check_improvement(g, T, TM, dec, M_bar, q)
    if problems:
        raise ImproveAuditError("; ".join(problems))
    w0 = w1 = None
    blocks = 0
    if weight_params:
        h, z = weight_params
        w0, C = compute_weight(degrees(T, n), h, z)
        w1 = compute_weight(degrees(TM, n), h, z)[0]
        blocks = len(C)
    rec = WaveRecord(gamma, gamma0, q, len(dec.leaf), len({v for _, v in inst.edges}), cm.flow.value,
                     cm.flow.S, len(M_hat), len(M_bar), w0, w1,
                     net.metrics.rounds_executed - start, len(dec.X), len(dec.X0), blocks)
    return ImproveResult(TM, M_hat, M_bar, rec, dec, cm)


# ---------------------------------------------------------------- potential

def block_index(d: int, h: int, z: int) -> int:
    """Largest j with d >= b_j = h + j z, or -1 below b_0."""
    return -1 if d < h else (d - h) // z


def compute_weight(deg, h: int, z: int) -> tuple[int, list[int]]:
    """Total potential and block sizes C_0, C_1, ... (exact integers)."""
    total = 0
    top = max((block_index(d, h, z) for d in deg), default=-1)
    C = [0] * (top + 1)
    for d in deg:
        j = block_index(d, h, z)
        if j < 0:
            total += 1
            continue
        for s in range(j + 1):
            C[s] += 1
        total += 1 + (d - h - j * z) * TAU ** j + z * (TAU ** j - 1) // (TAU - 1)
    return total, C


def choose_block(C: list[int]) -> int:
    """argmax_s C_s * tau^s, smallest index on ties; 0 when no block is non-empty."""
    best, arg = -1, 0
    for s, c in enumerate(C):
        if c * TAU ** s > best:
            best, arg = c * TAU ** s, s
    return arg


def block_counts(net: Network, T, h: int, z: int, label: str = "blocks") -> list[int]:
    n = net.n
    deg = degrees(T, n)
    top = net.global_aggregate({u: [deg[u]] for u in range(n)}, 1, "max", label)[0]
    t = block_index(top, h, z) + 1
    if t <= 0:
        return []
    vecs = {}
    for u in range(n):
        j = block_index(deg[u], h, z)
        if j >= 0:
            vecs[u] = [1 if s <= j else 0 for s in range(t)]
    return net.global_aggregate(vecs, t, "sum", label)


def rehab_cap(n: int) -> int:
    log_tau = math.ceil(math.log(max(n, 2), TAU))
    return 4 * (log_tau + 2) * math.ceil(6 * math.log2(max(n, 2)))


@dataclass
class RehabResult:
    tree: frozenset
    iterations: int
    waves: list[WaveRecord] = field(default_factory=list)
    skipped: int = 0
    final_blocks: list[int] = field(default_factory=list)
    trees: list[frozenset] = field(default_factory=list)


def rehab(net: Network, T, z: int, h: int, label: str = "rehab") -> RehabResult:
    if z < 1:
        raise ValueError("z must be >= 1")
    T = frozenset(canon(*e) for e in T)
    cap = rehab_cap(net.n)
    out = RehabResult(T, 0)
    j = 2
    while True:
        if out.iterations >= cap:
            raise RehabCapExceeded(T, out.iterations)
        out.iterations += 1
        b = lambda s: h + s * z
        try:
            res = improve(net, T, b(j), b(j - 2), z, label, weight_params=(h, z))
            T = res.tree
            out.waves.append(res.record)
            if res.record.w_after > res.record.w_before:
                raise ImproveAuditError(f"potential rose from {res.record.w_before} to {res.record.w_after}")
        except EmptyHighDegreeSet:
            out.skipped += 1
        out.trees.append(T)
        C = block_counts(net, T, h, z, label)
        j = choose_block(C)
        if j <= 1:
            out.final_blocks = C
            break
    out.tree = T
    return out


@dataclass
class EpochsResult:
    tree: frozenset
    h: int
    d_hat: int
    k: int
    z_schedule: list[int]
    rehabs: list[RehabResult]
    rounds: int
    final_max_degree: int
    all_spanning: bool

    def record(self) -> dict:
        return {
            "h": self.h,
            "d_hat": self.d_hat,
            "k": self.k,
            "z_schedule": self.z_schedule,
            "waves": sum(len(r.waves) for r in self.rehabs),
            "rehab_iterations": sum(r.iterations for r in self.rehabs),
            "rounds": self.rounds,
            "final_max_degree": self.final_max_degree,
            "all_spanning": self.all_spanning,
        }


def z_schedule(k: int, h: int) -> list[int]:
    zs, i = [], 2
    while True:
        z = max(1, math.ceil((k - h) / 2 ** i))
        zs.append(z)
        if z == 1:
            return zs
        i += 1


def epochs(net: Network, T0, d_hat: int = 2, h: int | None = None) -> EpochsResult:
    g, n = net.g, net.n
    T = frozenset(canon(*e) for e in T0)
    if not is_spanning_tree(g, T):
        raise ValueError("epochs needs a spanning tree to start from")
    h = h_param(d_hat) if h is None else h
    k = max(degrees(T, n))
    start = net.metrics.rounds_executed
    zs = z_schedule(k, h)
    rehabs = []
    ok = True
    for z in zs:
        r = rehab(net, T, z, h)
        rehabs.append(r)
        ok = ok and all(is_spanning_tree(g, t) for t in r.trees)
        T = r.tree
    return EpochsResult(T, h, d_hat, k, zs, rehabs, net.metrics.rounds_executed - start,
                        max(degrees(T, n)), ok)
