"""
A 30-node network at desk-scale physics
=======================================
"""
from miarouting import compare_routes, generate_random_network

net = generate_random_network(30, side=100.0, seed=2024)
R = net.rate_matrix

# Shannon rates in Mbit/s; even the longest links stay well above zero,
# which is why relaying buys relatively little here
off = R[R > 0]
print("link rates: min %.2f  median %.2f  max %.2f Mbit/s"
      % (off.min() / 1e6, float(sorted(off)[len(off) // 2]) / 1e6, off.max() / 1e6))

cmp = compare_routes(net, 1e6)
print("shortest path", cmp.sp.nodes, "%.5f s" % cmp.sp_delay)
print("cooperative  ", cmp.coop.order, "%.5f s" % cmp.coop_delay, "(%s)" % cmp.coop.method)
for kind, out in cmp.distributed.items():
    print("%-7s" % kind.value, out.decode_order, "%.5f s" % out.delay)
for name, ratio in cmp.ratios.items():
    print("%-18s %.4f" % (name, ratio))
