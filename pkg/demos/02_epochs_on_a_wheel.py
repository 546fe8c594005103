"""Start from the hub-centred star of a wheel (max degree n-1) and let the
epoch schedule pull the hub down to at most h + ceil(log4 n) + 2."""
import math

from congest_mdst.components import Network
from congest_mdst.graph import canon, generate
from congest_mdst.refine import epochs
from congest_mdst.runtime import SimConfig

n = 200
g = generate("wheel", n)
star = frozenset(canon(0, i) for i in range(1, n))
net = Network(g, SimConfig(seed=1))
res = epochs(net, star, d_hat=2)
print(f"h={res.h} z schedule={res.z_schedule}")
for rh in res.rehabs:
    ws = rh.waves
    if ws:
        print(f"  rehab: {len(ws)} waves, weight {ws[0].w_before} -> {ws[-1].w_after}")
bound = res.h + math.ceil(math.log(n, 4)) + 2
print(f"max degree {n - 1} -> {res.final_max_degree} (bound {bound}), rounds {net.metrics.rounds_executed}")
