"""Cooperative routing with mutual-information accumulation.

Transmission-order search, LP resource allocation, a shortest-path
baseline and distributed decode-and-forward simulation.
"""
from .allocation import (Allocation, InfeasibleOrder, RouteSolution, Semantics, build_delay_lp,
                         energy_of, greedy_forward_allocation, min_energy_allocation,
                         optimal_allocation)
from .baseline import Comparison, NoRoute, Path, compare_routes, shortest_path
from .distsim import (DistributedOutcome, Policy, PolicyKind, Stalled, TraceEvent,
                      decode_order_of, simulate_distributed, write_trace_csv)
from .harness import (ExperimentConfig, ExperimentError, ExperimentReport, emit_csv,
                      emit_summary, run_experiment, write_report)
from .lpsolve import LpProblem, LpSolution, Status, check_feasible, solve
from .netmodel import (ChannelParams, Network, NetworkFormatError, Node, generate_random_network,
                       link_rate, load_network, path_gain, rate_matrix, save_network)
from .ordersearch import (SearchConfig, SearchTooLarge, centralized_search, exhaustive_best_order,
                          greedy_insertion_search, heuristic_search, local_search_swaps)

__version__ = "0.1.0"
