"""Merge-based MDST approximation: maximum degree O(d log n).

Each phase matches components to each other, then attaches the unmatched
ones as satellites to neighbouring nodes of capacity d_hat, and merges.
d_hat starts at 2 and doubles whenever fewer than half of the unmatched
components found a partner.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .components import Network, check_views, component_merge
from .graph import Graph, degrees, diameter, is_forest, is_spanning_tree
from .matchings import (
    DEFAULT_C,
    component_matching,
    d_cm,
    verify_component_matching,
    verify_one_d,
)
from .runtime import RunMetrics, SimConfig, define_kind, log2ceil

define_kind("UQ_IN")  # sender lies in an unmatched component


class PhaseBudgetExhausted(RuntimeError):
    def __init__(self, result: "MdstResult"):
        super().__init__(f"still {result.n - len(result.tree)} components after "
                         f"{result.phases} phases")
        self.result = result


class ForestAuditError(AssertionError):
    pass


@dataclass
class PhaseRecord:
    phase: int
    components_before: int
    components_after: int
    d_hat: int
    attempts: list[tuple[int, int, int]]  # (d_hat, matched, total) per d-CM attempt
    U: int
    M: int
    Mp: int
    cm_maximal: bool
    dcm_maximal: bool
    max_gain: int
    saturated: bool = False

    @property
    def ratio(self) -> float:
        return self.components_after / self.components_before

    @property
    def successful(self) -> bool:
        d, matched, total = self.attempts[-1]
        return 2 * matched >= total


@dataclass
class MdstResult:
    tree: frozenset
    n: int
    D: int
    seed: int
    phases: int
    rounds: int
    final_max_degree: int
    d_hat_final: int
    forest_checks_passed: bool
    spanning: bool
    failed_attempts: int
    dhat_saturated: bool
    phase_log: list[PhaseRecord] = field(default_factory=list)
    metrics: RunMetrics = field(default_factory=RunMetrics)

    def record(self) -> dict:
        return {
            "n": self.n,
            "D": self.D,
            "seed": self.seed,
            "phases": self.phases,
            "rounds": self.rounds,
            "final_max_degree": self.final_max_degree,
            "d_hat_final": self.d_hat_final,
            "forest_checks_passed": self.forest_checks_passed,
            "spanning_tree": self.spanning,
            "failed_attempts": self.failed_attempts,
            "dhat_saturated": self.dhat_saturated,
        }


def estimate_d(matched: int, total: int, d_hat: int, n: int) -> tuple[bool, int]:
    """Success test for one d-CM attempt and the estimate to use next."""
    if 2 * matched >= total:
        return True, d_hat
    return False, 2 * d_hat


def phase_progress_check(before: int, after: int) -> tuple[float, bool]:
    """Component-count ratio of one phase and whether it exceeds 3/4."""
    ratio = after / before
    return ratio, 4 * after > 3 * before


def matching_mdst(g: Graph, cfg: SimConfig | None = None, backend: str = "fast", c: int = DEFAULT_C,
                  net: Network | None = None, audit: bool = True) -> MdstResult:
    """Spanning tree of maximum degree O(d log n); raises PhaseBudgetExhausted
    (carrying the partial forest) if the phase budget runs out."""
    cfg = cfg or SimConfig()
    net = net or Network(g, cfg, backend)
    n = g.n
    comps = net.comps
    E: set = set()
    d_hat = 2
    failed = 0
    saturated = False
    checks_ok = True
    log: list[PhaseRecord] = []
    max_phases = c * log2ceil(n)
    phase = 0
    while True:
        count = net.global_aggregate({L: [1] for L in comps.groups()}, 1, "sum", "count")[0]
        if count == 1:
            break
        if phase == max_phases:
            raise PhaseBudgetExhausted(_result(g, cfg, net, E, phase, d_hat, checks_ok, failed, saturated, log))
        phase += 1
        lead = [comps.leader(u) for u in range(n)]
        deg_before = degrees(E, n)
        cm = component_matching(net, comps, c)
        touched = {lead[u] for e in cm.edges for u in e}
        U = {L for L in set(lead) if L not in touched}
        inbox = net.exchange({u: ("UQ_IN", ()) for u in range(n) if lead[u] in U}, "uq")
        Q = {v for v in range(n) if lead[v] not in U and inbox[v]}
        attempts = []
        phase_sat = False
        while True:
            res = d_cm(net, U, Q, d_hat, comps, c)
            won = {lead[u] for u, _ in res.edges}
            matched, total = net.global_aggregate(
                {L: [int(L in won), 1] for L in U}, 2, "sum", "dcm-test")
            attempts.append((d_hat, matched, total))
            ok, nxt = estimate_d(matched, total, d_hat, n)
            if ok:
                break
            if d_hat >= n:
                # only reachable when d-CM missed maximality; keep the valid edges
                phase_sat = saturated = True
                break
            d_hat = nxt
            failed += 1
        Mp = list(res.edges)
        component_merge(net, cm.edges, Mp, comps)
        E |= set(cm.edges) | {tuple(sorted(e)) for e in Mp}
        after = comps.count()
        deg_after = degrees(E, n)
        gain = max(a - b for a, b in zip(deg_after, deg_before))
        rec = PhaseRecord(phase, count, after, d_hat, attempts, len(U), len(cm.edges), len(Mp),
                          False, False, gain, phase_sat)
        if audit:
            lab = lead
            rec.cm_maximal = verify_component_matching(g, lab, cm.edges).maximal
            rec.dcm_maximal = verify_one_d(g, lab, U, Q, d_hat, Mp).maximal
            problems = []
            if not is_forest(n, E):
                problems.append("cycle in the merged forest")
            try:
                check_views(g, comps)
            except Exception as exc:  # recorded, then re-raised below
                problems.append(str(exc))
            if gain > 1 + d_hat:
                problems.append(f"a node gained {gain} > 1 + {d_hat} edges")
            if rec.dcm_maximal and 2 * len(Mp) < len(U):
                problems.append(f"|M'| = {len(Mp)} < |U|/2 = {len(U) / 2}")
            if problems:
                checks_ok = False
                raise ForestAuditError(f"phase {phase}: " + "; ".join(problems))
        log.append(rec)
    return _result(g, cfg, net, E, phase, d_hat, checks_ok, failed, saturated, log)


def _result(g, cfg, net, E, phases, d_hat, ok, failed, saturated, log) -> MdstResult:
    tree = frozenset(tuple(sorted(e)) for e in E)
    return MdstResult(
        tree=tree,
        n=g.n,
        D=diameter(g),
        seed=cfg.seed,
        phases=phases,
        rounds=net.metrics.rounds_executed,
        final_max_degree=max(degrees(tree, g.n)) if g.n else 0,
        d_hat_final=d_hat,
        forest_checks_passed=ok,
        spanning=is_spanning_tree(g, tree),
        failed_attempts=failed,
        dhat_saturated=saturated,
        phase_log=log,
        metrics=net.metrics,
    )
