"""Synchronous broadcast-CONGEST round engine.

Every round each node hands the engine at most one envelope, and the engine
delivers that same envelope to every neighbour at the start of the next
step. Payloads are fixed-width bit records, so the declared size of a
message depends only on its kind and on ``n``.
"""
from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .graph import Graph, diameter

KIND_TAG_BITS = 8


class EngineError(RuntimeError):
    pass


class BudgetViolation(EngineError):
    def __init__(self, node: int, round: int, bits: int, budget: int):
        super().__init__(f"node {node} sent {bits} bits in round {round} (budget {budget})")
        self.node, self.round, self.bits, self.budget = node, round, bits, budget


class MaxRoundsExceeded(EngineError):
    pass


class SlotCollision(EngineError):
    pass


def log2ceil(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def word_bits(n: int) -> int:
    """Width of one node id; at least 8 so the kind tag stays a small fraction."""
    return max(8, log2ceil(n))


def default_max_rounds(g: Graph) -> int:
    lg = log2ceil(g.n)
    return int(10 * (diameter(g) + math.sqrt(g.n)) * lg * lg) + 1000


@dataclass
class SimConfig:
    c_msg: int = 8
    max_rounds: int | None = None
    seed: int = 0
    strict_budget: bool = True
    trace: str | None = None

    def __post_init__(self):
        if self.c_msg < 1:
            raise ValueError("c_msg must be >= 1")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")

    def budget_bits(self, n: int) -> int:
        return self.c_msg * word_bits(n)


@dataclass
class RunMetrics:
    rounds_executed: int = 0
    messages_sent: int = 0
    max_declared_bits: int = 0
    budget_violations: int = 0
    phase_rounds: dict[str, int] = field(default_factory=dict)

    def charge(self, label: str, rounds: int) -> None:
        self.rounds_executed += rounds
        self.phase_rounds[label] = self.phase_rounds.get(label, 0) + rounds

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds_executed,
            "messages": self.messages_sent,
            "max_bits": self.max_declared_bits,
            "budget_violations": self.budget_violations,
            "phase_rounds": dict(sorted(self.phase_rounds.items())),
        }


# ---------------------------------------------------------------- codec

_KINDS: dict[str, tuple[int, tuple[str, ...]]] = {}
_TAGS: dict[int, str] = {}

# field widths as multiples of the word w (plus presence/extra bits)
_WIDTH = {
    "flag": (0, 1),
    "id": (1, 0),
    "id?": (1, 1),
    "count": (1, 1),
    "prio": (3, 0),
    "key": (5, 0),
    "key?": (5, 1),
    "val": (5, 0),
    "val?": (5, 1),
}


def define_kind(name: str, *fields: str) -> str:
    """Register a message kind with its field layout; idempotent per name."""
    for f in fields:
        if f not in _WIDTH:
            raise ValueError(f"unknown field spec {f!r}")
    if name in _KINDS:
        if _KINDS[name][1] != fields:
            raise ValueError(f"kind {name!r} redefined with a different layout")
        return name
    tag = len(_KINDS)
    if tag >= 1 << KIND_TAG_BITS:
        raise ValueError("too many message kinds")
    _KINDS[name] = (tag, fields)
    _TAGS[tag] = name
    return name


def field_bits(spec: str, w: int) -> int:
    mult, extra = _WIDTH[spec]
    return mult * w + extra


def kind_bits(name: str, n: int) -> int:
    w = word_bits(n)
    return KIND_TAG_BITS + sum(field_bits(f, w) for f in _KINDS[name][1])


@dataclass(frozen=True)
class RoundEnvelope:
    sender: int
    payload: bytes
    declared_bits: int
    kind: str = ""


class Codec:
    def __init__(self, n: int):
        self.n = n
        self.w = word_bits(n)

    def check(self, kind: str, values: Sequence) -> None:
        fields = _KINDS[kind][1]
        if len(values) != len(fields):
            raise ValueError(f"{kind}: expected {len(fields)} fields, got {len(values)}")
        for spec, v in zip(fields, values):
            if v is None:
                if not spec.endswith("?"):
                    raise ValueError(f"{kind}: field {spec} is not optional")
                continue
            width = field_bits(spec, self.w) - (1 if spec.endswith("?") else 0)
            if not (0 <= int(v) < (1 << width)):
                raise ValueError(f"{kind}: value {v} does not fit field {spec} ({width} bits)")
            if spec.startswith("id") and int(v) >= self.n:
                raise ValueError(f"{kind}: {v} is not a node id below {self.n}")

    def encode(self, sender: int, kind: str, values: Sequence) -> RoundEnvelope:
        self.check(kind, values)
        tag, fields = _KINDS[kind]
        acc, nbits = tag, KIND_TAG_BITS
        for spec, v in zip(fields, values):
            width = field_bits(spec, self.w)
            if spec.endswith("?"):
                inner = width - 1
                word = 0 if v is None else (1 << inner) | int(v)
            else:
                word = int(v)
            acc |= word << nbits
            nbits += width
        return RoundEnvelope(sender, acc.to_bytes((nbits + 7) // 8, "little"), nbits, kind)

    def decode(self, env: RoundEnvelope) -> tuple[str, tuple]:
        acc = int.from_bytes(env.payload, "little")
        tag = acc & ((1 << KIND_TAG_BITS) - 1)
        kind = _TAGS[tag]
        acc >>= KIND_TAG_BITS
        out = []
        for spec in _KINDS[kind][1]:
            width = field_bits(spec, self.w)
            word = acc & ((1 << width) - 1)
            acc >>= width
            if spec.endswith("?"):
                inner = width - 1
                out.append(word & ((1 << inner) - 1) if word >> inner else None)
            elif spec == "flag":
                out.append(bool(word))
            else:
                out.append(word)
        return kind, tuple(out)


# ---------------------------------------------------------------- randomness

def node_random(seed: int, node: int, rnd: int, tag: str, k: int = 0) -> int:
    """128 uniform bits keyed by (seed, node, round, tag, k); backend independent."""
    h = hashlib.blake2b(digest_size=16)
    h.update(struct.pack("<qqqq", seed, node, rnd, k))
    h.update(tag.encode())
    return int.from_bytes(h.digest(), "little")


def randbelow(seed: int, node: int, rnd: int, tag: str, bound: int, k: int = 0) -> int:
    if bound <= 0:
        raise ValueError("bound must be positive")
    # 128 bits against bounds below 2**64: bias is at most 2**-64
    return node_random(seed, node, rnd, tag, k) % bound


def coin(seed: int, node: int, rnd: int, tag: str, k: int = 0) -> bool:
    return bool(node_random(seed, node, rnd, tag, k) & 1)


def bernoulli(seed: int, node: int, rnd: int, tag: str, num: int, den: int, k: int = 0) -> bool:
    """True with probability num/den, up to a bias below 2**-64."""
    return randbelow(seed, node, rnd, tag, den, k) < num


# ---------------------------------------------------------------- programs

class NodeProgram:
    """Per-node behaviour. Subclasses override the four callbacks."""

    def init(self, node: int, neighbors: tuple[int, ...], params: dict) -> None:
        self.node = node
        self.neighbors = neighbors
        self.params = params

    def step(self, round: int, inbox: list[RoundEnvelope]) -> RoundEnvelope | None:
        return None

    def is_done(self) -> bool:
        return True

    def output(self) -> Any:
        return None


class Interleaved(NodeProgram):
    """Runs sub-program k on global rounds r with r % K == k."""

    def __init__(self, subs: Sequence[NodeProgram], slots: Sequence[int] | None = None):
        if len(subs) < 2:
            raise ValueError("interleave needs at least two sub-programs")
        slots = list(range(len(subs))) if slots is None else list(slots)
        if len(slots) != len(subs):
            raise ValueError("one slot per sub-program")
        if len(set(slots)) != len(slots):
            raise SlotCollision(f"slot assignment {slots} reuses a slot")
        self.K = max(slots) + 1
        if self.K != len(slots):
            raise SlotCollision(f"slots {slots} leave a gap; the schedule would idle")
        self.by_slot = {s: p for s, p in zip(slots, subs)}
        self.local = {s: 0 for s in slots}
        self.pending: dict[int, list[RoundEnvelope]] = {s: [] for s in slots}

    def init(self, node, neighbors, params):
        super().init(node, neighbors, params)
        for p in self.by_slot.values():
            p.init(node, neighbors, params)

    def step(self, round, inbox):
        if round > 1 and inbox:
            self.pending[(round - 1) % self.K].extend(inbox)
        slot = round % self.K
        prog = self.by_slot[slot]
        if prog.is_done():
            self.pending[slot] = []
            return None
        self.local[slot] += 1
        got, self.pending[slot] = self.pending[slot], []
        return prog.step(self.local[slot], got)

    def is_done(self):
        return all(p.is_done() for p in self.by_slot.values())

    def output(self):
        return [self.by_slot[s].output() for s in sorted(self.by_slot)]


def interleave(factories: Sequence[Callable[[int], NodeProgram]], slots: Sequence[int] | None = None):
    """Compose per-node factories into one factory of interleaved programs."""
    if slots is not None and len(set(slots)) != len(slots):
        raise SlotCollision(f"slot assignment {list(slots)} reuses a slot")
    return lambda u: Interleaved([f(u) for f in factories], slots)


def run(
    g: Graph,
    factory: Callable[[int], NodeProgram],
    cfg: SimConfig,
    params: dict | None = None,
    label: str = "run",
    round_offset: int = 0,
    max_rounds: int | None = None,
) -> tuple[list, RunMetrics]:
    """Step every node until all report done.

    ``rounds_executed`` counts up to the last round in which anyone
    broadcast; trailing steps in which nodes only absorb their inbox are
    free. ``round_offset`` shifts the round numbers written to the trace.
    """
    n = g.n
    cap = max_rounds or cfg.max_rounds or default_max_rounds(g)
    budget = cfg.budget_bits(n)
    params = dict(params or {})
    params.setdefault("n", n)
    params.setdefault("seed", cfg.seed)
    progs = [factory(u) for u in range(n)]
    for u in range(n):
        progs[u].init(u, g.adj[u], params)
    m = RunMetrics()
    trace = open(cfg.trace, "a") if cfg.trace else None
    inbox: list[list[RoundEnvelope]] = [[] for _ in range(n)]
    r = last = sent = 0
    try:
        while not all(p.is_done() for p in progs):
            r += 1
            if r > cap:
                raise MaxRoundsExceeded(f"{label}: still running after {cap} rounds")
            nxt: list[list[RoundEnvelope]] = [[] for _ in range(n)]
            for u in range(n):
                p = progs[u]
                if p.is_done():
                    continue
                env = p.step(r, inbox[u])
                if env is None:
                    continue
                if env.sender != u:
                    raise EngineError(f"node {u} forged sender {env.sender}")
                bits = env.declared_bits
                if bits > budget:
                    if cfg.strict_budget:
                        raise BudgetViolation(u, round_offset + r, bits, budget)
                    m.budget_violations += 1
                m.max_declared_bits = max(m.max_declared_bits, bits)
                sent += 1
                last = r
                for v in g.adj[u]:
                    nxt[v].append(env)
                if trace:
                    trace.write(json.dumps({"round": round_offset + r, "sender": u,
                                            "kind": env.kind, "bits": bits}) + "\n")
            inbox = nxt
    finally:
        if trace:
            trace.close()
    m.messages_sent = sent
    m.charge(label, last)
    return [p.output() for p in progs], m
