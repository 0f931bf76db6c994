import csv

import numpy as np
import pytest

from miarouting.allocation import optimal_allocation
from miarouting.baseline import policy_semantics
from miarouting.distsim import (DECODED, TX_START, TX_STOP, Policy, PolicyKind, Stalled,
                                decode_order_of, parse_policy_kind, simulate_distributed,
                                write_trace_csv)
from miarouting.netmodel import Network, Node, generate_random_network
from miarouting.ordersearch import SearchConfig, exhaustive_best_order
from miarouting.prng import trial_seed

from oracles import integrate_trace

TOL = 1e-9
KINDS = list(PolicyKind)


def rated_net(R, powers=None):
    n = len(R)
    powers = powers or [1.0] * n
    return Network(tuple(Node(i, float(i), 0.0, powers[i]) for i in range(n)), source=0,
                   destination=n - 1, rates=tuple(map(tuple, np.asarray(R, float))))


TRIANGLE = [[0, 4, 1], [0, 0, 4], [0, 0, 0]]


@pytest.mark.parametrize("kind", KINDS)
def test_two_nodes(kind):
    out = simulate_distributed(rated_net([[0, 4.0], [0, 0]]), 2.0, kind)
    assert out.delay == pytest.approx(0.5)
    assert decode_order_of(out) == (0, 1)
    assert out.energy == pytest.approx(0.5)


def test_triangle_latest_decoder():
    out = simulate_distributed(rated_net(TRIANGLE), 1.0, "latest")
    assert out.decode_order == (0, 1, 2)
    assert out.decode_times == pytest.approx((0.0, 0.25, 0.4375))
    assert out.delay == pytest.approx(0.4375)
    assert out.energy == pytest.approx(0.4375)


def test_triangle_broadcast_all():
    out = simulate_distributed(rated_net(TRIANGLE), 1.0, "bcast")
    assert out.delay == pytest.approx(0.4)
    # s for 0.4 s plus r for 0.15 s
    assert out.energy == pytest.approx(0.55)


def test_triangle_round_robin():
    # after 0.25 s the 1 ms quantum alternates r and s; d gains 2.5 bit/s on average
    out = simulate_distributed(rated_net(TRIANGLE), 1.0, Policy("rr", 1e-3))
    assert out.delay == pytest.approx(0.55, rel=1e-6)
    assert out.decode_order == (0, 1, 2)


@pytest.mark.parametrize("kind", KINDS)
def test_trace_structure_and_integration(kind):
    for t in range(6):
        net = generate_random_network(8, 100.0, trial_seed(2, t))
        out = simulate_distributed(net, 1e6, kind)
        times = [e.time for e in out.trace]
        assert all(a <= b for a, b in zip(times, times[1:]))
        last = out.trace[-1]
        assert (last.node, last.event) == (net.destination, DECODED)
        assert last.time == out.delay
        decoded_at = {}
        for i, ev in enumerate(out.trace):
            if ev.event == DECODED:
                decoded_at[ev.node] = i
            elif ev.event == TX_START:
                assert decoded_at.get(ev.node, len(out.trace)) < i
        for node, bits in integrate_trace(out.trace, net.rate_matrix, net.n).items():
            assert bits == pytest.approx(1e6, rel=1e-9)


@pytest.mark.parametrize("kind", KINDS)
def test_decode_times_strictly_increase(kind):
    for t in range(6):
        out = simulate_distributed(generate_random_network(10, 100.0, trial_seed(4, t)), 1e6, kind)
        assert all(a < b for a, b in zip(out.decode_times, out.decode_times[1:]))
        assert out.decode_order[0] == 0 and out.decode_order[-1] == 9


@pytest.mark.parametrize("kind", KINDS)
def test_lp_on_emergent_order_is_a_lower_bound(kind):
    for t in range(10):
        net = generate_random_network(10, 100.0, trial_seed(6, t))
        out = simulate_distributed(net, 1e6, kind)
        lp = optimal_allocation(out.decode_order, net.rate_matrix, 1e6,
                                policy_semantics(out.policy.kind), powers=net.powers)
        assert out.delay >= lp.delay - TOL * (1 + lp.delay)


@pytest.mark.parametrize("kind", KINDS)
def test_exhaustive_is_a_global_lower_bound(kind):
    for t in range(8):
        net = generate_random_network(6, 100.0, trial_seed(8, t))
        out = simulate_distributed(net, 1e6, kind)
        cfg = SearchConfig(semantics=policy_semantics(parse_policy_kind(kind)))
        best = exhaustive_best_order(net, 1e6, cfg)
        assert out.delay >= best.delay - TOL * (1 + best.delay)


def test_stall_raises_with_partial_trace():
    # s reaches only r, and r reaches nobody
    R = [[0, 4, 0], [0, 0, 0], [0, 0, 0]]
    for kind in ("latest", "bcast"):
        with pytest.raises(Stalled) as err:
            simulate_distributed(rated_net(R), 1.0, kind)
        assert any(e.event == DECODED and e.node == 1 for e in err.value.trace)
    with pytest.raises(Stalled):
        simulate_distributed(rated_net(np.zeros((2, 2))), 1.0, "rr")


def test_latest_decoder_can_stall_where_broadcast_succeeds():
    # r1 decodes first and is a dead end; s keeps feeding r2, which reaches d
    R = np.zeros((4, 4))
    R[0, 1], R[0, 2], R[0, 3] = 4.0, 2.0, 0.5
    R[2, 3] = 4.0
    out = simulate_distributed(rated_net(R), 1.0, "bcast")
    assert out.decode_order[-1] == 3
    with pytest.raises(Stalled):
        simulate_distributed(rated_net(R), 1.0, "latest")


def test_undecoded_node_absent_from_order():
    # node 2 hears nobody; d decodes directly
    R = np.zeros((4, 4))
    R[0, 3], R[0, 1] = 2.0, 1.0
    out = simulate_distributed(rated_net(R), 1.0, "latest")
    assert decode_order_of(out) == (0, 3)
    assert 2 not in out.decode_order and 1 not in out.decode_order


def test_policy_parsing():
    assert parse_policy_kind("Round-Robin") is PolicyKind.ROUND_ROBIN
    assert Policy("broadcast").kind is PolicyKind.BROADCAST_ALL
    with pytest.raises(ValueError):
        Policy("flood")
    with pytest.raises(ValueError):
        Policy("rr", 0.0)


def test_trace_csv_export(tmp_path):
    out = simulate_distributed(rated_net(TRIANGLE), 1.0, "latest")
    path = tmp_path / "trace.csv"
    write_trace_csv(out, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["time_s", "node_id", "event"]
    assert len(rows) == len(out.trace) + 1
    assert rows[-1] == ["0.4375", "2", DECODED]
    assert {r[2] for r in rows[1:]} == {DECODED, TX_START, TX_STOP}
    with pytest.raises(OSError, match="trace"):
        write_trace_csv(out, tmp_path / "missing" / "t.csv")
