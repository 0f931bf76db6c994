"""Event-driven simulation of distributed decode-and-forward policies.

Nodes only react to decode beacons; nobody consults the global rate
matrix when deciding who transmits. The matrix is used solely to play
out the physics (how fast each receiver accumulates).
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DECODED, TX_START, TX_STOP = "decoded", "tx_start", "tx_stop"
# decode instants closer than this (relative) are treated as simultaneous
_SIMULTANEOUS = 1e-12


class PolicyKind(enum.Enum):
    LATEST_DECODER = "latest"
    ROUND_ROBIN = "rr"
    BROADCAST_ALL = "bcast"


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind = PolicyKind.LATEST_DECODER
    quantum: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_policy_kind(self.kind))
        if not self.quantum > 0:
            raise ValueError("quantum must be positive")


def parse_policy_kind(value) -> PolicyKind:
    if isinstance(value, PolicyKind):
        return value
    key = str(value).strip().lower().replace("-", "_")
    aliases = {
        "latest": PolicyKind.LATEST_DECODER, "latest_decoder": PolicyKind.LATEST_DECODER,
        "latestdecoder": PolicyKind.LATEST_DECODER,
        "rr": PolicyKind.ROUND_ROBIN, "round_robin": PolicyKind.ROUND_ROBIN,
        "roundrobin": PolicyKind.ROUND_ROBIN,
        "bcast": PolicyKind.BROADCAST_ALL, "broadcast": PolicyKind.BROADCAST_ALL,
        "broadcast_all": PolicyKind.BROADCAST_ALL, "broadcastall": PolicyKind.BROADCAST_ALL,
    }
    if key not in aliases:
        raise ValueError(f"unknown policy {value!r}")
    return aliases[key]


@dataclass(frozen=True)
class TraceEvent:
    time: float
    node: int
    event: str


@dataclass(frozen=True)
class DistributedOutcome:
    policy: Policy
    decode_order: tuple[int, ...]
    decode_times: tuple[float, ...]
    delay: float
    energy: float
    trace: tuple[TraceEvent, ...] = field(repr=False)


class Stalled(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = tuple(trace)


def simulate_distributed(net, bits: float, policy: Policy | str = Policy()) -> DistributedOutcome:
    if not isinstance(policy, Policy):
        policy = Policy(policy)
    kind = policy.kind
    R = net.rate_matrix
    P = net.powers
    n = net.n
    s, d = net.source, net.destination

    acc = np.zeros(n)
    acc[s] = bits
    decoded = np.zeros(n, dtype=bool)
    decoded[s] = True
    order, times = [s], [0.0]
    trace = [TraceEvent(0.0, s, DECODED), TraceEvent(0.0, s, TX_START)]
    active = [s]
    rotation, rr_pos, quanta = [s], 0, 1
    t, energy = 0.0, 0.0

    while True:
        waiting = ~decoded
        rate = R[active].sum(axis=0) * waiting
        with np.errstate(divide="ignore", invalid="ignore"):
            ttd = np.where(rate > 0, (bits - acc) / rate, np.inf)
        dt = ttd.min()
        boundary = np.inf
        if kind is PolicyKind.ROUND_ROBIN:
            boundary = quanta * policy.quantum
            if not np.isfinite(dt) and not np.any(R[rotation][:, waiting] > 0):
                raise Stalled(f"no decoded node reaches an undecoded node at t={t}", trace)
        elif not np.isfinite(dt):
            raise Stalled(f"active transmitters {active} reach no undecoded node at t={t}", trace)

        if t + dt < boundary:
            t_next = t + dt
            step = dt
        else:
            t_next = boundary
            step = boundary - t
        acc += rate * step
        energy += P[active].sum() * step

        newly = []
        if step >= dt * (1 - _SIMULTANEOUS) and np.isfinite(dt):
            newly = [int(i) for i in np.nonzero(ttd <= dt * (1 + _SIMULTANEOUS))[0]]
            acc[newly] = bits
            decoded[newly] = True
        t = float(t_next)

        if d in newly:
            for i in newly:
                if i != d:
                    order.append(i)
                    times.append(t)
                    trace.append(TraceEvent(t, i, DECODED))
            for a in active:
                trace.append(TraceEvent(t, a, TX_STOP))
            order.append(d)
            times.append(t)
            trace.append(TraceEvent(t, d, DECODED))
            return DistributedOutcome(policy, tuple(order), tuple(times), t, float(energy), tuple(trace))

        for i in newly:
            order.append(i)
            times.append(t)
            trace.append(TraceEvent(t, i, DECODED))

        if kind is PolicyKind.LATEST_DECODER and newly:
            trace.append(TraceEvent(t, active[0], TX_STOP))
            active = [newly[-1]]
            trace.append(TraceEvent(t, active[0], TX_START))
        elif kind is PolicyKind.BROADCAST_ALL:
            for i in newly:
                active.append(i)
                trace.append(TraceEvent(t, i, TX_START))
        elif kind is PolicyKind.ROUND_ROBIN:
            rotation.extend(newly)
            if t >= boundary:
                quanta += 1
                rr_pos = (rr_pos + 1) % len(rotation)
                if rotation[rr_pos] != active[0]:
                    trace.append(TraceEvent(t, active[0], TX_STOP))
                    active = [rotation[rr_pos]]
                    trace.append(TraceEvent(t, active[0], TX_START))


def decode_order_of(outcome: DistributedOutcome) -> tuple[int, ...]:
    return outcome.decode_order


def write_trace_csv(outcome_or_trace, path) -> None:
    trace = getattr(outcome_or_trace, "trace", outcome_or_trace)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "node_id", "event"])
            for ev in trace:
                w.writerow([repr(float(ev.time)), ev.node, ev.event])
    except OSError as exc:
        raise OSError(f"cannot write trace to {Path(path)}: {exc}") from exc
