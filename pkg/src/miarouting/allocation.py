"""Delay-optimal time allocation for a fixed transmission order.

A transmission order ``v_0 .. v_K`` lists the source, the relays in the
order they decode, and the destination. Phase ``k`` (1..K) ends when
``v_k`` has accumulated ``bits`` of mutual information; during phase ``k``
only ``v_0 .. v_{k-1}`` may transmit.

Two semantics are supported:

``ORTHOGONAL``
    one transmitter at a time; variable ``x[k, m]`` is the time ``v_m``
    spends transmitting in phase ``k``. Delay is the sum of all ``x``.
``BROADCAST_ALL``
    every decoded node transmits for the whole phase and receivers add the
    rates; variable ``x[k]`` is the length of phase ``k``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .lpsolve import DEFAULT_TOL, LpProblem, Status, check_feasible, solve

TIE_BREAK_SLACK = 1e-9


class Semantics(enum.Enum):
    ORTHOGONAL = "orthogonal"
    BROADCAST_ALL = "broadcast"

    @classmethod
    def parse(cls, value) -> "Semantics":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"orthogonal": cls.ORTHOGONAL, "broadcast": cls.BROADCAST_ALL,
                   "broadcast_all": cls.BROADCAST_ALL, "broadcastall": cls.BROADCAST_ALL}
        if key not in aliases:
            raise ValueError(f"unknown semantics {value!r}")
        return aliases[key]


class InfeasibleOrder(ValueError):
    """Some node in the order can never accumulate the message."""

    def __init__(self, order, node):
        super().__init__(f"node {node} has zero rate from every predecessor in order {tuple(order)}")
        self.order = tuple(order)
        self.node = node


@dataclass(frozen=True)
class Allocation:
    semantics: Semantics
    order: tuple[int, ...]
    x: np.ndarray
    delay: float
    energy: float

    @property
    def n_phases(self) -> int:
        return len(self.order) - 1

    def phase_lengths(self) -> np.ndarray:
        """Duration of each phase ``1..K``."""
        if self.semantics is Semantics.BROADCAST_ALL:
            return self.x.copy()
        K = self.n_phases
        return np.array([self.x[_ortho_index(k, 0):_ortho_index(k, k)].sum() for k in range(1, K + 1)])

    def decode_times(self) -> np.ndarray:
        return np.cumsum(self.phase_lengths())

    def durations(self) -> dict[tuple[int, int], float]:
        """``{(phase, transmitter node id): seconds}`` for nonzero entries."""
        out = {}
        K = self.n_phases
        for k in range(1, K + 1):
            if self.semantics is Semantics.ORTHOGONAL:
                for m in range(k):
                    t = float(self.x[_ortho_index(k, m)])
                    if t > 0:
                        out[(k, self.order[m])] = t
            else:
                t = float(self.x[k - 1])
                if t > 0:
                    for m in range(k):
                        out[(k, self.order[m])] = t
        return out


@dataclass(frozen=True)
class RouteSolution:
    order: tuple[int, ...]
    allocation: Allocation
    method: str

    @property
    def delay(self) -> float:
        return self.allocation.delay

    @property
    def energy(self) -> float:
        return self.allocation.energy


def _ortho_index(k: int, m: int) -> int:
    return k * (k - 1) // 2 + m


@lru_cache(maxsize=64)
def _ortho_layout(K: int):
    phase = np.concatenate([np.full(k, k) for k in range(1, K + 1)])
    sender = np.concatenate([np.arange(k) for k in range(1, K + 1)])
    return phase, sender


def validate_order(order: Sequence[int], n: int) -> tuple[int, ...]:
    order = tuple(int(v) for v in order)
    if len(order) < 2:
        raise ValueError("a transmission order needs at least source and destination")
    if len(set(order)) != len(order):
        raise ValueError(f"repeated node in order {order}")
    if min(order) < 0 or max(order) >= n:
        raise ValueError(f"order {order} references nodes outside 0..{n - 1}")
    return order


def _delay_coefficients(order, semantics: Semantics) -> np.ndarray:
    K = len(order) - 1
    n = K * (K + 1) // 2 if semantics is Semantics.ORTHOGONAL else K
    return np.ones(n)


def _energy_coefficients(order, powers, semantics: Semantics) -> np.ndarray:
    P = np.asarray(powers, dtype=float)[list(order)]
    K = len(order) - 1
    if semantics is Semantics.ORTHOGONAL:
        _, sender = _ortho_layout(K)
        return P[sender]
    return np.cumsum(P[:K])


def build_delay_lp(order: Sequence[int], rates, bits: float,
                   semantics: Semantics = Semantics.ORTHOGONAL) -> LpProblem:
    """Accumulation LP: one ``>= bits`` row per non-source node of ``order``."""
    R = np.asarray(rates, dtype=float)
    order = validate_order(order, R.shape[0])
    semantics = Semantics.parse(semantics)
    if not bits > 0:
        raise ValueError(f"bits must be positive, got {bits}")
    K = len(order) - 1
    S = R[np.ix_(order, order)]
    reached = np.triu(S > 0, 1).any(axis=0)
    reached[0] = True
    if not reached.all():
        raise InfeasibleOrder(order, order[int(np.argmin(reached))])
    recv = np.arange(1, K + 1)
    if semantics is Semantics.ORTHOGONAL:
        phase, sender = _ortho_layout(K)
        A = S[sender][:, recv].T * (phase[None, :] <= recv[:, None])
    else:
        # rate into v_k while v_0..v_{j-1} all transmit
        incoming = np.cumsum(S[:K, :], axis=0)[:, recv].T  # [k-1, j-1]
        A = np.tril(incoming)
    return LpProblem(_delay_coefficients(order, semantics), A, np.full(K, float(bits)))


def energy_of(alloc: Allocation, net_or_powers, order: Sequence[int] | None = None) -> float:
    """Joules spent by ``alloc``; accepts a Network or a per-node power vector."""
    powers = getattr(net_or_powers, "powers", net_or_powers)
    order = alloc.order if order is None else tuple(order)
    return float(_energy_coefficients(order, powers, alloc.semantics) @ alloc.x)


def _solve_checked(p: LpProblem, tol: float):
    sol = solve(p, tol)
    if sol.status is Status.UNBOUNDED:
        raise RuntimeError("allocation LP reported unbounded; this cannot happen for nonnegative costs")
    if sol.status is Status.INFEASIBLE:
        raise RuntimeError("allocation LP reported infeasible despite reachable nodes")
    return sol


def optimal_allocation(order: Sequence[int], rates, bits: float,
                       semantics: Semantics = Semantics.ORTHOGONAL,
                       tol: float = DEFAULT_TOL, powers=None) -> Allocation:
    """Minimum-delay allocation for ``order``.

    Without ``powers`` every node is taken to radiate 1 W, so ``energy`` is
    transmitter-seconds. Among delay-optimal allocations the one with least
    energy is returned (delay relaxed by a relative ``1e-9``).
    """
    semantics = Semantics.parse(semantics)
    R = np.asarray(rates, dtype=float)
    p = build_delay_lp(order, R, bits, semantics)
    order = validate_order(order, R.shape[0])
    if powers is None:
        powers = np.ones(R.shape[0])
    sol = _solve_checked(p, tol)
    x = sol.x
    c_energy = _energy_coefficients(order, powers, semantics)
    if np.any(c_energy != c_energy[0]):
        T = sol.objective
        tie = LpProblem(c_energy, np.vstack([p.A, -p.c]),
                        np.append(p.b, -T * (1.0 + TIE_BREAK_SLACK)))
        refined = solve(tie, tol)
        if refined.status is Status.OPTIMAL:
            x = refined.x
    return Allocation(semantics, order, x, float(p.c @ x), float(c_energy @ x))


def min_energy_allocation(order: Sequence[int], net, bits: float,
                          semantics: Semantics = Semantics.ORTHOGONAL,
                          tol: float = DEFAULT_TOL) -> Allocation:
    """Same constraints as the delay LP, energy objective."""
    semantics = Semantics.parse(semantics)
    p = build_delay_lp(order, net.rate_matrix, bits, semantics)
    order = validate_order(order, net.n)
    c_energy = _energy_coefficients(order, net.powers, semantics)
    sol = _solve_checked(LpProblem(c_energy, p.A, p.b), tol)
    return Allocation(semantics, order, sol.x, float(p.c @ sol.x), float(c_energy @ sol.x))


def greedy_forward_allocation(order: Sequence[int], rates, bits: float, powers=None) -> Allocation:
    """Feasible orthogonal allocation: each phase uses only the predecessor
    with the strongest link to the next decoder, for just long enough."""
    R = np.asarray(rates, dtype=float)
    p = build_delay_lp(order, R, bits, Semantics.ORTHOGONAL)
    order = validate_order(order, R.shape[0])
    K = len(order) - 1
    S = R[np.ix_(order, order)]
    x = np.zeros(p.n_vars)
    for k in range(1, K + 1):
        deficit = bits - p.A[k - 1] @ x
        if deficit <= 0:
            continue
        m = int(np.argmax(S[:k, k]))
        x[_ortho_index(k, m)] = deficit / S[m, k]
    if powers is None:
        powers = np.ones(R.shape[0])
    energy = float(_energy_coefficients(order, powers, Semantics.ORTHOGONAL) @ x)
    return Allocation(Semantics.ORTHOGONAL, order, x, float(x.sum()), energy)


def allocation_feasible(alloc: Allocation, rates, bits: float, tol: float = DEFAULT_TOL) -> bool:
    return check_feasible(build_delay_lp(alloc.order, rates, bits, alloc.semantics), alloc.x, tol)
