"""Experiment runner: one JSON record per (graph, seed, algorithm)."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .components import Network
from .graph import Graph, canon, degrees, generate, is_spanning_tree, read_graph
from .matchings import component_matching, d_cm, verify_component_matching, verify_one_d
from .mdst_log import ForestAuditError, PhaseBudgetExhausted, matching_mdst
from .refine import EmptyHighDegreeSet, ImproveAuditError, RehabCapExceeded, epochs, improve
from .runtime import BudgetViolation, SimConfig, log2ceil

ALGORITHMS = ("matching-mdst", "epochs", "component-matching", "d-cm", "improve")


def parse_n(text: str) -> list[int]:
    """``64`` or ``64..512`` (doubling)."""
    if ".." not in text:
        return [int(text)]
    lo, hi = (int(x) for x in text.split(".."))
    if lo < 1 or hi < lo:
        raise ValueError(f"bad range {text!r}")
    out = []
    while lo <= hi:
        out.append(lo)
        lo *= 2
    return out


def parse_params(items: list[str] | None) -> dict:
    out = {}
    for item in items or []:
        k, _, v = item.partition("=")
        if v in ("true", "false"):
            out[k] = v == "true"
        else:
            try:
                out[k] = int(v)
            except ValueError:
                out[k] = float(v)
    return out


def worker_count(cells: int) -> int:
    cap = int(os.environ.get("CONGEST_MDST_THREADS", "1") or 1)
    return max(1, min(cap, cells))


def hub_tree(g: Graph) -> frozenset:
    """BFS tree rooted at a maximum-degree node."""
    root = max(range(g.n), key=lambda u: (g.degree(u), -u))
    parent = {root: -1}
    order = [root]
    for u in order:
        for v in g.adj[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
    return frozenset(canon(u, p) for u, p in parent.items() if p >= 0)


def scaling_denominator(n: int, D: int, power: int = 2) -> float:
    return (D + math.sqrt(n)) * log2ceil(n) ** power


@dataclass
class Cell:
    alg: str
    gen: str | None
    n: int
    seed: int
    params: dict = field(default_factory=dict)
    graph_path: str | None = None
    c_msg: int = 8
    trace: str | None = None
    backend: str = "fast"
    start: str = "matching-mdst"
    d: int = 2
    q: int = 2


def _graph(cell: Cell) -> Graph:
    if cell.graph_path:
        return read_graph(cell.graph_path)
    return generate(cell.gen, cell.n, cell.params, cell.seed)


def _metrics(net: Network) -> dict:
    m = net.metrics
    return {
        "messages_sent": m.messages_sent,
        "max_declared_bits": m.max_declared_bits,
        "budget_bits": net.budget,
        "budget_violations": m.budget_violations,
        "phase_rounds": dict(sorted(m.phase_rounds.items())),
    }


def run_cell(cell: Cell) -> dict:
    """Run one cell; ``ok`` is False iff a deterministic invariant failed."""
    g = _graph(cell)
    cfg = SimConfig(c_msg=cell.c_msg, seed=cell.seed, trace=cell.trace)
    rec: dict = {"alg": cell.alg, "graph": cell.graph_path or cell.gen, "params": cell.params,
                 "n": g.n, "m": g.m, "D": g.diameter, "seed": cell.seed, "c_msg": cell.c_msg}
    try:
        net = Network(g, cfg, cell.backend)
        rec.update(_RUNNERS[cell.alg](g, net, cell))
        rec.update(_metrics(net))
    except (ForestAuditError, ImproveAuditError, BudgetViolation) as exc:
        rec.update(ok=False, error=f"{type(exc).__name__}: {exc}")
    except (PhaseBudgetExhausted, RehabCapExceeded) as exc:
        # budget exhaustion is reported, not an invariant failure
        rec.update(ok=True, spanning_tree=False, error=f"{type(exc).__name__}: {exc}")
    return rec


def _run_mdst(g, net, cell):
    r = matching_mdst(g, net.cfg, net=net)
    return {
        **r.record(),
        "max_degree": r.final_max_degree,
        "scaling_ratio": r.rounds / scaling_denominator(g.n, r.D),
        "phase_log": [{"phase": p.phase, "components_before": p.components_before,
                       "components_after": p.components_after, "d_hat": p.d_hat, "U": p.U,
                       "M": p.M, "Mp": p.Mp, "cm_maximal": p.cm_maximal,
                       "dcm_maximal": p.dcm_maximal, "attempts": p.attempts} for p in r.phase_log],
        "ok": r.spanning and r.forest_checks_passed,
    }


def _run_epochs(g, net, cell):
    r0 = matching_mdst(g, net.cfg, net=net)
    T0 = r0.tree if cell.start == "matching-mdst" else hub_tree(g)
    res = epochs(net, T0, r0.d_hat_final)
    bound = res.h + math.ceil(math.log(max(g.n, 2), 4)) + 2
    return {
        **res.record(),
        "start": cell.start,
        "start_max_degree": max(degrees(T0, g.n)),
        "mdst_rounds": r0.rounds,
        "epochs_rounds": res.rounds,
        "rounds": net.metrics.rounds_executed,
        "degree_bound": bound,
        "spanning_tree": is_spanning_tree(g, res.tree),
        "waves": [w.to_dict() for rh in res.rehabs for w in rh.waves],
        "ok": res.all_spanning and is_spanning_tree(g, res.tree),
    }


def _run_cm(g, net, cell):
    cm = component_matching(net)
    chk = verify_component_matching(g, list(range(g.n)), cm.edges)
    return {"size": len(cm.edges), "maximal": chk.maximal, "rounds": net.metrics.rounds_executed,
            "ok": chk.valid}


def _run_dcm(g, net, cell):
    cm = component_matching(net)
    lead = list(range(g.n))
    touched = {u for e in cm.edges for u in e}
    U = set(range(g.n)) - touched
    Q = {v for v in touched if any(w in U for w in g.adj[v])}
    res = d_cm(net, U, Q, cell.d, net.comps)
    chk = verify_one_d(g, lead, U, Q, cell.d, res.edges)
    return {"d": cell.d, "U": len(U), "Q": len(Q), "size": len(res.edges), "maximal": chk.maximal,
            "rounds": net.metrics.rounds_executed, "ok": chk.valid}


def _run_improve(g, net, cell):
    T = hub_tree(g)
    k = max(degrees(T, g.n))
    gamma0 = max(1, k // 2)
    try:
        res = improve(net, T, k, gamma0, cell.q)
    except EmptyHighDegreeSet:
        return {"skipped": True, "ok": True}
    return {**res.record.to_dict(), "start_max_degree": k,
            "final_max_degree": max(degrees(res.tree, g.n)),
            "spanning_tree": is_spanning_tree(g, res.tree), "ok": is_spanning_tree(g, res.tree)}


_RUNNERS = {
    "matching-mdst": _run_mdst,
    "epochs": _run_epochs,
    "component-matching": _run_cm,
    "d-cm": _run_dcm,
    "improve": _run_improve,
}


def run_cells(cells: list[Cell]) -> list[dict]:
    workers = worker_count(len(cells))
    if workers == 1:
        return [run_cell(c) for c in cells]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(run_cell, cells))


def scaling_summary(records: list[dict], power: int = 2) -> dict:
    """Least-squares fit of rounds against (D + sqrt n) * ceil(log2 n)^power."""
    pts = [(r["n"], r["rounds"], scaling_denominator(r["n"], r["D"], power)) for r in records
           if "rounds" in r and r.get("ok")]
    by_n: dict[int, list[float]] = {}
    for n, rounds, den in pts:
        by_n.setdefault(n, []).append(rounds / den)
    means = {n: float(np.mean(v)) for n, v in sorted(by_n.items())}
    x = np.array([p[2] for p in pts])
    y = np.array([p[1] for p in pts])
    fitted = float(x @ y / (x @ x)) if len(pts) else float("nan")
    ns = np.log2(np.array(list(means), dtype=float))
    ms = np.array(list(means.values()))
    slope, stderr = float("nan"), float("nan")
    if len(ms) >= 3:
        A = np.vstack([ns, np.ones_like(ns)]).T
        coef, res, *_ = np.linalg.lstsq(A, ms, rcond=None)
        slope = float(coef[0])
        resid = ms - A @ coef
        s2 = float(resid @ resid) / (len(ms) - 2)
        stderr = math.sqrt(s2 / float(((ns - ns.mean()) ** 2).sum()))
    lo, hi = (min(ms), max(ms)) if len(ms) else (float("nan"),) * 2
    return {
        "summary": "scaling",
        "power": power,
        "fitted_ratio": fitted,
        "mean_ratio_by_n": {str(k): v for k, v in means.items()},
        "drift": (hi - lo) / lo if len(ms) else float("nan"),
        "slope_per_doubling": slope,
        "slope_stderr": stderr,
    }


def dumps(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")
