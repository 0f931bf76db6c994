"""Conventional store-and-forward shortest-path routing."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .allocation import RouteSolution


class NoRoute(RuntimeError):
    pass


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    per_hop_delay: tuple[float, ...]
    total_delay: float
    total_energy: float


def shortest_path(net, bits: float) -> Path:
    """Dijkstra with hop weight ``bits / C(i->j)``.

    Equal-distance labels resolve to the smaller predecessor id.
    """
    R = net.rate_matrix
    P = net.powers
    n = net.n
    s, d = net.source, net.destination
    dist = np.full(n, np.inf)
    pred = [-1] * n
    dist[s] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, s)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == d:
            break
        for v in np.nonzero(R[u] > 0)[0]:
            if done[v]:
                continue
            alt = du + bits / R[u, v]
            if alt < dist[v] or (alt == dist[v] and u < pred[v]):
                dist[v] = alt
                pred[v] = u
                heapq.heappush(heap, (alt, int(v)))
    if not np.isfinite(dist[d]):
        raise NoRoute(f"destination {d} unreachable from {s}")
    nodes = [d]
    while nodes[-1] != s:
        nodes.append(pred[nodes[-1]])
    nodes.reverse()
    hops = tuple(float(bits / R[a, b]) for a, b in zip(nodes, nodes[1:]))
    energy = float(sum(P[a] * t for a, t in zip(nodes, hops)))
    return Path(tuple(nodes), hops, float(sum(hops)), energy)


@dataclass(frozen=True)
class Comparison:
    """Shortest path vs centralized cooperative routing vs distributed runs.

    ``coop`` is searched under ``cfg.semantics``. Each distributed policy is
    also paired with the centralized optimum of the allocation model it
    physically realizes (one transmitter at a time, or everyone at once),
    stored in ``coop_by_semantics``.
    """

    sp: Path
    coop: RouteSolution
    coop_by_semantics: dict
    distributed: dict
    ratios: dict

    @property
    def sp_delay(self) -> float:
        return self.sp.total_delay

    @property
    def coop_delay(self) -> float:
        return self.coop.delay

    def distributed_delay(self, kind) -> float:
        return self.distributed[kind].delay


def compare_routes(net, bits: float, cfg=None, policies=None, quantum: float = 1e-3) -> Comparison:
    """Run all three approaches on ``net``.

    Orders that the shortest path and the distributed runs discovered are
    handed to the centralized search as extra candidates: a planner with
    full channel knowledge can always replay them, so the centralized
    answer never loses to either.
    """
    from .distsim import Policy, PolicyKind, simulate_distributed
    from .ordersearch import SearchConfig, centralized_search

    cfg = cfg or SearchConfig()
    if policies is None:
        policies = list(PolicyKind)
    sp = shortest_path(net, bits)
    distributed = {}
    for kind in policies:
        pol = Policy(kind, quantum)
        distributed[pol.kind] = simulate_distributed(net, bits, pol)
    candidates = [sp.nodes] + [o.decode_order for o in distributed.values()]
    needed = {cfg.semantics} | {policy_semantics(k) for k in distributed}
    coop_by_semantics = {}
    for sem in sorted(needed, key=lambda s: s.value):
        scfg = replace(cfg, semantics=sem)
        coop_by_semantics[sem] = centralized_search(net, bits, scfg, candidates)
    coop = coop_by_semantics[cfg.semantics]
    ratios = {"sp_over_coop": sp.total_delay / coop.delay}
    for kind, out in distributed.items():
        ratios[f"{kind.value}_over_coop"] = out.delay / coop_by_semantics[policy_semantics(kind)].delay
    return Comparison(sp, coop, coop_by_semantics, distributed, ratios)


def policy_semantics(kind):
    """Allocation model a distributed policy's schedule belongs to."""
    from .allocation import Semantics
    from .distsim import PolicyKind

    if kind is PolicyKind.BROADCAST_ALL:
        return Semantics.BROADCAST_ALL
    return Semantics.ORTHOGONAL
