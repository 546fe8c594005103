"""The round-by-round engine and the fast backend produce the same tree and
the same round count; the engine also checks every message against the bit
budget."""
import time

from congest_mdst.components import Network
from congest_mdst.graph import generate
from congest_mdst.mdst_log import matching_mdst
from congest_mdst.runtime import SimConfig

g = generate("grid", 64)
for backend in ("fast", "engine"):
    t = time.time()
    net = Network(g, SimConfig(seed=3), backend)
    r = matching_mdst(g, net.cfg, net=net)
    m = net.metrics
    print(f"{backend:6s} degree={r.final_max_degree} rounds={r.rounds} "
          f"max bits={m.max_declared_bits}/{net.budget} violations={m.budget_violations} "
          f"({time.time() - t:.1f}s)")
