"""Node geometry, power-law path loss and Shannon link rates."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .prng import Xoshiro256StarStar


class NetworkFormatError(ValueError):
    """Malformed network file or inconsistent network definition."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ChannelParams:
    alpha: float = 3.0
    noise_psd: float = 1e-17
    bandwidth: float = 1e6
    d_min: float = 0.01

    def __post_init__(self):
        if not self.alpha >= 0:
            raise NetworkFormatError("alpha", f"must be >= 0, got {self.alpha}")
        for name in ("noise_psd", "bandwidth", "d_min"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise NetworkFormatError(name, f"must be positive and finite, got {value}")


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    power: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise NetworkFormatError("nodes", f"node {self.id} has a non-finite position")
        if not (self.power > 0 and math.isfinite(self.power)):
            raise NetworkFormatError("power", f"node {self.id} power must be > 0, got {self.power}")


@dataclass(frozen=True)
class Network:
    """Nodes are stored sorted by id; ids are exactly ``0..n-1`` so an id is
    also the row index into the rate matrix."""

    nodes: tuple[Node, ...]
    params: ChannelParams = field(default_factory=ChannelParams)
    source: int = 0
    destination: int = -1
    rates: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes, key=lambda nd: nd.id))
        ids = [nd.id for nd in nodes]
        if len(set(ids)) != len(ids):
            raise NetworkFormatError("id", "duplicate node ids")
        if ids != list(range(len(ids))):
            raise NetworkFormatError("id", "node ids must be exactly 0..n-1")
        n = len(nodes)
        if n < 2:
            raise NetworkFormatError("nodes", "a network needs at least 2 nodes")
        object.__setattr__(self, "nodes", nodes)
        dest = self.destination if self.destination >= 0 else n - 1
        object.__setattr__(self, "destination", dest)
        for name, v in (("source", self.source), ("destination", dest)):
            if not 0 <= v < n:
                raise NetworkFormatError(name, f"unknown node id {v}")
        if self.source == dest:
            raise NetworkFormatError("destination", "source and destination coincide")
        if self.rates is not None:
            R = np.asarray(self.rates, dtype=float)
            if R.shape != (n, n):
                raise NetworkFormatError("rates", f"expected a {n}x{n} matrix, got shape {R.shape}")
            if not np.all(np.isfinite(R)) or np.any(R < 0):
                raise NetworkFormatError("rates", "entries must be finite and nonnegative")
            if np.any(np.diag(R) != 0):
                raise NetworkFormatError("rates", "diagonal must be zero")
            object.__setattr__(self, "rates", tuple(tuple(float(v) for v in row) for row in R))

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def powers(self) -> np.ndarray:
        return np.array([nd.power for nd in self.nodes])

    @property
    def positions(self) -> np.ndarray:
        return np.array([(nd.x, nd.y) for nd in self.nodes])

    @cached_property
    def rate_matrix(self) -> np.ndarray:
        R = rate_matrix(self)
        R.setflags(write=False)
        return R

    def with_rates(self, rates) -> "Network":
        return Network(self.nodes, self.params, self.source, self.destination,
                       tuple(map(tuple, np.asarray(rates, dtype=float))))


def path_gain(distance, alpha: float, d_min: float):
    """``max(distance, d_min) ** -alpha``; works elementwise on arrays."""
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be nonnegative")
    if alpha < 0 or d_min <= 0:
        raise ValueError("need alpha >= 0 and d_min > 0")
    g = np.maximum(d, d_min) ** (-alpha)
    return float(g) if g.ndim == 0 else g


def link_rate(power, gain, params: ChannelParams):
    """Shannon rate ``W log2(1 + P g / (N0 W))`` in bits/s."""
    W = params.bandwidth
    r = W * np.log2(1.0 + np.asarray(power, dtype=float) * gain / (params.noise_psd * W))
    return float(r) if np.ndim(r) == 0 else r


def rate_matrix(net: Network) -> np.ndarray:
    """Pairwise rates; row = transmitter, column = receiver."""
    if net.rates is not None:
        return np.array(net.rates, dtype=float)
    pos = net.positions
    d = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=-1))
    g = path_gain(d, net.params.alpha, net.params.d_min)
    R = link_rate(net.powers[:, None], g, net.params)
    np.fill_diagonal(R, 0.0)
    return R


def generate_random_network(n: int, side: float = 100.0, seed: int = 0,
                            params: ChannelParams | None = None,
                            power: float = 0.1) -> Network:
    """``n`` nodes uniform on ``[0, side]^2``; node 0 is the source, node
    ``n-1`` the destination. Coordinates are drawn x then y, node by node."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if not side > 0:
        raise ValueError(f"side must be positive, got {side}")
    rng = Xoshiro256StarStar(seed)
    nodes = []
    for i in range(n):
        x = rng.uniform(0.0, side)
        y = rng.uniform(0.0, side)
        nodes.append(Node(i, x, y, power))
    return Network(tuple(nodes), params or ChannelParams(), 0, n - 1)


def network_to_dict(net: Network) -> dict:
    out = {
        "params": {
            "alpha": net.params.alpha,
            "noise_psd": net.params.noise_psd,
            "bandwidth": net.params.bandwidth,
            "d_min": net.params.d_min,
        },
        "nodes": [{"id": nd.id, "x": nd.x, "y": nd.y, "power": nd.power} for nd in net.nodes],
        "source": net.source,
        "destination": net.destination,
    }
    if net.rates is not None:
        out["rates"] = [list(row) for row in net.rates]
    return out


def _require(obj: dict, key: str, where: str = ""):
    if not isinstance(obj, dict) or key not in obj:
        raise NetworkFormatError(key, f"missing required field{where}")
    return obj[key]


def network_from_dict(data: dict) -> Network:
    if not isinstance(data, dict):
        raise NetworkFormatError("network", "top level must be a JSON object")
    p = _require(data, "params")
    try:
        params = ChannelParams(**{k: float(_require(p, k, " in params"))
                                  for k in ("alpha", "noise_psd", "bandwidth", "d_min")})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, NetworkFormatError):
            raise
        raise NetworkFormatError("params", str(exc)) from exc
    raw_nodes = _require(data, "nodes")
    if not isinstance(raw_nodes, list):
        raise NetworkFormatError("nodes", "must be a list")
    nodes = []
    for i, rn in enumerate(raw_nodes):
        vals = {k: _require(rn, k, f" in nodes[{i}]") for k in ("id", "x", "y", "power")}
        if isinstance(vals["id"], bool) or not isinstance(vals["id"], int):
            raise NetworkFormatError("id", f"nodes[{i}] id must be an integer")
        try:
            nodes.append(Node(vals["id"], float(vals["x"]), float(vals["y"]), float(vals["power"])))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, NetworkFormatError):
                raise
            raise NetworkFormatError("nodes", f"nodes[{i}]: {exc}") from exc
    source = _require(data, "source")
    destination = _require(data, "destination")
    for name, v in (("source", source), ("destination", destination)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise NetworkFormatError(name, "must be a nonnegative integer node id")
    rates = data.get("rates")
    if rates is not None:
        try:
            rates = tuple(tuple(float(v) for v in row) for row in rates)
        except (TypeError, ValueError) as exc:
            raise NetworkFormatError("rates", "must be a list of numeric rows") from exc
    return Network(tuple(nodes), params, source, destination, rates)


def save_network(net: Network, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), indent=2) + "\n")


def load_network(path) -> Network:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise NetworkFormatError("network", f"{path}: invalid JSON ({exc})") from exc
    return network_from_dict(data)
