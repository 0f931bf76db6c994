"""
One relay, three ways
=====================

A source, a relay and a destination with hand-picked link rates. The
numbers are small enough to check by hand.
"""
import numpy as np

from miarouting import (Network, Node, Semantics, exhaustive_best_order,
                        optimal_allocation, shortest_path, simulate_distributed)

# C(s->r) = C(r->d) = 4 bit/s, C(s->d) = 1 bit/s, message of 1 bit
R = ((0.0, 4.0, 1.0),
     (0.0, 0.0, 4.0),
     (0.0, 0.0, 0.0))
net = Network(tuple(Node(i, float(i), 0.0, 1.0) for i in range(3)), rates=R)

# store-and-forward: 1/4 + 1/4 beats the direct 1 s hop
sp = shortest_path(net, 1.0)
print("shortest path", sp.nodes, sp.total_delay)

# with accumulation the destination keeps what it overheard from s while r
# was decoding (0.25 bit), so r only has to send the remaining 0.75 bit
for order in [(0, 2), (0, 1, 2)]:
    a = optimal_allocation(order, net.rate_matrix, 1.0)
    print("order", order, "delay", a.delay, "phases", a.phase_lengths())

best = exhaustive_best_order(net, 1.0)
print("best order", best.order, best.delay, "ratio", sp.total_delay / best.delay)

# letting s and r transmit together (rates add at d) is faster still
b = optimal_allocation((0, 1, 2), net.rate_matrix, 1.0, Semantics.BROADCAST_ALL)
print("broadcast delay", b.delay)

# the distributed policies find the same thing from local events alone
for policy in ("latest", "rr", "bcast"):
    out = simulate_distributed(net, 1.0, policy)
    print(policy, out.decode_order, np.round(out.decode_times, 4), "energy", out.energy)
