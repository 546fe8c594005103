"""Build a low-degree spanning tree of a random graph and compare it with
the exact optimum and with a BFS tree."""
from congest_mdst.bench import hub_tree
from congest_mdst.graph import degrees, generate
from congest_mdst.mdst_log import matching_mdst
from congest_mdst.oracles import exact_mdst
from congest_mdst.runtime import SimConfig

g = generate("random-connected", 40, {"p": 0.2}, 7)
r = matching_mdst(g, SimConfig(seed=7))
opt = exact_mdst(g, "search")
print(f"n={g.n} m={g.m} D={g.diameter}")
print(f"BFS tree max degree      : {max(degrees(hub_tree(g), g.n))}")
print(f"matching-mdst max degree : {r.final_max_degree} after {len(r.phase_log)} phases, {r.rounds} rounds")
print(f"exact optimum            : {opt.d}")
for p in r.phase_log:
    print(f"  phase {p.phase}: {p.components_before} -> {p.components_after} components, d_hat={p.d_hat}")
