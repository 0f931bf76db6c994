"""Command-line entry point: ``miarouting {gen,solve,baseline,distributed,experiment}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 experiment error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .allocation import InfeasibleOrder, Semantics
from .baseline import NoRoute, shortest_path
from .distsim import Policy, Stalled, simulate_distributed, write_trace_csv
from .harness import ExperimentConfig, ExperimentError, run_experiment, write_report
from .netmodel import ChannelParams, NetworkFormatError, generate_random_network, load_network, save_network
from .ordersearch import (SearchConfig, SearchTooLarge, centralized_search, exhaustive_best_order,
                          greedy_insertion_search, heuristic_search)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_EXPERIMENT = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_gen(args) -> int:
    params = ChannelParams(args.alpha, args.noise_psd, args.bandwidth, args.d_min)
    net = generate_random_network(args.n, args.side, args.seed, params, args.power)
    save_network(net, args.out)
    print(f"wrote {args.n}-node network to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    net = load_network(args.net)
    cfg = SearchConfig(semantics=Semantics.parse(args.semantics))
    if args.method == "exhaustive":
        sol = exhaustive_best_order(net, args.bits, cfg)
    elif args.method == "greedy":
        sol = greedy_insertion_search(net, args.bits, cfg)
    elif args.method == "local-search":
        sol = heuristic_search(net, args.bits, cfg)
    else:
        sol = centralized_search(net, args.bits, cfg)
    alloc = sol.allocation
    _dump({
        "method": sol.method,
        "semantics": alloc.semantics.value,
        "order": list(sol.order),
        "delay_s": alloc.delay,
        "energy_j": alloc.energy,
        "phase_lengths_s": alloc.phase_lengths().tolist(),
        "durations": [{"phase": k, "node": v, "seconds": t}
                      for (k, v), t in sorted(alloc.durations().items())],
    })
    return EXIT_OK


def cmd_baseline(args) -> int:
    path = shortest_path(load_network(args.net), args.bits)
    _dump({"nodes": list(path.nodes), "per_hop_delay_s": list(path.per_hop_delay),
           "total_delay_s": path.total_delay, "total_energy_j": path.total_energy})
    return EXIT_OK


def cmd_distributed(args) -> int:
    net = load_network(args.net)
    out = simulate_distributed(net, args.bits, Policy(args.policy, args.quantum))
    if args.trace:
        write_trace_csv(out, args.trace)
    _dump({"policy": out.policy.kind.value, "decode_order": list(out.decode_order),
           "decode_times_s": list(out.decode_times), "delay_s": out.delay, "energy_j": out.energy})
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.parallelism is not None:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "parallelism": args.parallelism})
    report = run_experiment(cfg)
    paths = write_report(report, args.out)
    agg = report.aggregates
    print(f"{agg['trials']} trials ({agg['flagged']} flagged); "
          f"mean sp/coop = {agg['sp_over_coop']['mean']}")
    for name, p in paths.items():
        print(f"{name}: {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="miarouting", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random network file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--side", type=float, default=100.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--power", type=float, default=0.1)
    g.add_argument("--alpha", type=float, default=3.0)
    g.add_argument("--noise-psd", type=float, default=1e-17)
    g.add_argument("--bandwidth", type=float, default=1e6)
    g.add_argument("--d-min", type=float, default=0.01)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="transmission order + allocation for one network")
    s.add_argument("--net", required=True)
    s.add_argument("--bits", type=float, default=1e6)
    s.add_argument("--semantics", choices=["orthogonal", "broadcast"], default="orthogonal")
    s.add_argument("--method", choices=["auto", "exhaustive", "greedy", "local-search"], default="auto")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("baseline", help="store-and-forward shortest path")
    b.add_argument("--net", required=True)
    b.add_argument("--bits", type=float, default=1e6)
    b.set_defaults(func=cmd_baseline)

    d = sub.add_parser("distributed", help="simulate a local-CSI policy")
    d.add_argument("--net", required=True)
    d.add_argument("--bits", type=float, default=1e6)
    d.add_argument("--policy", choices=["latest", "rr", "bcast"], default="latest")
    d.add_argument("--quantum", type=float, default=1e-3)
    d.add_argument("--trace", help="write the event trace as CSV")
    d.set_defaults(func=cmd_distributed)

    e = sub.add_parser("experiment", help="Monte-Carlo comparison")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--parallelism", type=int)
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ExperimentError as exc:
        print(f"experiment error: {exc}", file=sys.stderr)
        return EXIT_EXPERIMENT
    except (NetworkFormatError, NoRoute, Stalled, InfeasibleOrder, SearchTooLarge,
            OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
