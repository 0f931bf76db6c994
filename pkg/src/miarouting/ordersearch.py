"""Search over transmission orders (relay subset + decode order)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .allocation import (Allocation, InfeasibleOrder, RouteSolution, Semantics,
                         optimal_allocation)
from .lpsolve import DEFAULT_TOL

EXHAUSTIVE_LIMIT = 8


class SearchTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    max_exhaustive_nodes: int = 7
    max_iterations: int = 100
    tol: float = DEFAULT_TOL
    semantics: Semantics = Semantics.ORTHOGONAL

    def __post_init__(self):
        if self.max_exhaustive_nodes > EXHAUSTIVE_LIMIT:
            raise ValueError(f"max_exhaustive_nodes must be <= {EXHAUSTIVE_LIMIT}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        object.__setattr__(self, "semantics", Semantics.parse(self.semantics))


class OrderEvaluator:
    """Memoized ``order -> Allocation`` for one (network, bits, config)."""

    def __init__(self, net, bits: float, cfg: SearchConfig):
        self.net = net
        self.bits = bits
        self.cfg = cfg
        self.rates = net.rate_matrix
        self.powers = net.powers
        self._cache: dict[tuple[int, ...], Allocation | None] = {}

    def __call__(self, order: Sequence[int]) -> Allocation | None:
        order = tuple(order)
        if order not in self._cache:
            try:
                alloc = optimal_allocation(order, self.rates, self.bits, self.cfg.semantics,
                                           self.cfg.tol, self.powers)
            except InfeasibleOrder:
                alloc = None
            self._cache[order] = alloc
        return self._cache[order]

    @property
    def evaluations(self) -> int:
        return len(self._cache)


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * (1.0 + max(abs(a), abs(b)))


def _preferred(a: Allocation, b: Allocation | None, tol: float) -> bool:
    """Delay first, then energy, then the lexicographically smaller order."""
    if b is None:
        return True
    if not _close(a.delay, b.delay, tol):
        return a.delay < b.delay
    if not _close(a.energy, b.energy, tol):
        return a.energy < b.energy
    return a.order < b.order


def _improves(new: float, old: float, tol: float) -> bool:
    if old == float("inf"):
        return new < old
    return new < old - tol * (1.0 + old)


def exhaustive_best_order(net, bits: float, cfg: SearchConfig = SearchConfig()) -> RouteSolution:
    if net.n > cfg.max_exhaustive_nodes:
        raise SearchTooLarge(f"{net.n} nodes exceeds max_exhaustive_nodes={cfg.max_exhaustive_nodes}")
    evaluate = OrderEvaluator(net, bits, cfg)
    s, d = net.source, net.destination
    relays = [i for i in range(net.n) if i not in (s, d)]
    best = None
    for k in range(len(relays) + 1):
        for mid in itertools.permutations(relays, k):
            alloc = evaluate((s, *mid, d))
            if alloc is not None and _preferred(alloc, best, cfg.tol):
                best = alloc
    if best is None:
        raise InfeasibleOrder((s, d), d)
    return RouteSolution(best.order, best, "exhaustive")


def greedy_insertion_search(net, bits: float, cfg: SearchConfig = SearchConfig(),
                            evaluate: OrderEvaluator | None = None) -> RouteSolution:
    """Cheapest-insertion growth from the direct order.

    The direct order may itself be infeasible (zero source-destination rate);
    it then counts as infinitely slow, so any feasible insertion is taken.
    """
    evaluate = evaluate or OrderEvaluator(net, bits, cfg)
    s, d = net.source, net.destination
    order = (s, d)
    current = evaluate(order)
    cur_delay = current.delay if current is not None else float("inf")
    unused = [i for i in range(net.n) if i not in (s, d)]
    while unused:
        best_alloc, best_node = None, None
        for node in unused:
            for pos in range(1, len(order)):
                alloc = evaluate(order[:pos] + (node,) + order[pos:])
                if alloc is not None and (best_alloc is None or alloc.delay < best_alloc.delay):
                    best_alloc, best_node = alloc, node
        if best_alloc is None or not _improves(best_alloc.delay, cur_delay, cfg.tol):
            break
        current, order, cur_delay = best_alloc, best_alloc.order, best_alloc.delay
        unused.remove(best_node)
    if current is None:
        raise InfeasibleOrder(order, d)
    return RouteSolution(order, current, "greedy")


def _neighbours(order: tuple[int, ...], unused: Sequence[int]) -> Iterable[tuple[int, ...]]:
    s, mid, d = order[0], list(order[1:-1]), order[-1]
    r = len(mid)
    for i in range(r):
        for j in range(i + 1, r):
            m = mid.copy()
            m[i], m[j] = m[j], m[i]
            yield (s, *m, d)
    for i in range(r):
        yield (s, *mid[:i], *mid[i + 1:], d)
    for i in range(r):
        rest = mid[:i] + mid[i + 1:]
        for j in range(r):
            if j != i:
                yield (s, *rest[:j], mid[i], *rest[j:], d)
    for node in unused:
        for j in range(r + 1):
            yield (s, *mid[:j], node, *mid[j:], d)


def local_search_swaps(net, bits: float, init: RouteSolution,
                       cfg: SearchConfig = SearchConfig(),
                       evaluate: OrderEvaluator | None = None) -> RouteSolution:
    """Steepest-descent hill climbing over swap / remove / move / insert moves.

    Never returns anything worse than ``init``.
    """
    evaluate = evaluate or OrderEvaluator(net, bits, cfg)
    current = init.allocation
    for _ in range(cfg.max_iterations):
        used = set(current.order)
        unused = [i for i in range(net.n) if i not in used]
        best = None
        for cand in _neighbours(current.order, unused):
            alloc = evaluate(cand)
            if alloc is not None and (best is None or alloc.delay < best.delay):
                best = alloc
        if best is None or not _improves(best.delay, current.delay, cfg.tol):
            break
        current = best
    if current is init.allocation:
        return init
    return RouteSolution(current.order, current, "local-search")


def heuristic_search(net, bits: float, cfg: SearchConfig = SearchConfig(),
                     candidates: Iterable[Sequence[int]] = ()) -> RouteSolution:
    """Greedy insertion polished by local search; any extra candidate
    orders (e.g. a shortest path) are evaluated and kept if better."""
    evaluate = OrderEvaluator(net, bits, cfg)
    best = local_search_swaps(net, bits, greedy_insertion_search(net, bits, cfg, evaluate), cfg, evaluate)
    for order in candidates:
        alloc = evaluate(order)
        # no noise threshold here: a replayable order that is better at all
        # must never leave the search looking worse than it
        if alloc is not None and alloc.delay < best.delay:
            best = RouteSolution(alloc.order, alloc, "local-search")
    return best


def centralized_search(net, bits: float, cfg: SearchConfig = SearchConfig(),
                       candidates: Iterable[Sequence[int]] = ()) -> RouteSolution:
    """Exhaustive when the network is small enough, heuristic otherwise."""
    if net.n <= cfg.max_exhaustive_nodes:
        return exhaustive_best_order(net, bits, cfg)
    return heuristic_search(net, bits, cfg, candidates)
