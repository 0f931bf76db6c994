"""Monte-Carlo experiment driver and report writers."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .allocation import InfeasibleOrder, Semantics
from .baseline import NoRoute, compare_routes
from .distsim import PolicyKind, Stalled, parse_policy_kind
from .netmodel import ChannelParams, generate_random_network
from .ordersearch import SearchConfig
from .prng import MASK64, trial_seed

CSV_COLUMNS = [
    "trial", "seed", "n_nodes", "sp_delay_s", "coop_delay_s",
    "dist_latest_delay_s", "dist_rr_delay_s", "dist_bcast_delay_s",
    "sp_energy_j", "coop_energy_j", "sp_over_coop", "flagged",
]
MAX_FLAGGED_FRACTION = 0.5


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    trials: int = 100
    n_nodes: int = 30
    side: float = 100.0
    alpha: float = 3.0
    noise_psd: float = 1e-17
    bandwidth: float = 1e6
    d_min: float = 0.01
    power: float = 0.1
    bits: float = 1e6
    seed: int = 1
    semantics: Semantics = Semantics.ORTHOGONAL
    policies: tuple[PolicyKind, ...] = tuple(PolicyKind)
    search: SearchConfig = field(default_factory=SearchConfig)
    parallelism: int = 1
    quantum: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "semantics", Semantics.parse(self.semantics))
        object.__setattr__(self, "policies", tuple(parse_policy_kind(p) for p in self.policies))
        if isinstance(self.search, dict):
            object.__setattr__(self, "search", SearchConfig(**self.search))
        object.__setattr__(self, "search", SearchConfig(
            self.search.max_exhaustive_nodes, self.search.max_iterations,
            self.search.tol, self.semantics))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_nodes < 2:
            raise ValueError("n_nodes must be >= 2")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        for name in ("side", "noise_psd", "bandwidth", "d_min", "power", "bits", "quantum"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        object.__setattr__(self, "seed", int(self.seed) & MASK64)

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(self.alpha, self.noise_psd, self.bandwidth, self.d_min)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "search" in data:
            search = dict(data["search"])
            search.pop("semantics", None)
            data["search"] = SearchConfig(**search)
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "trials": self.trials, "n_nodes": self.n_nodes, "side": self.side,
            "alpha": self.alpha, "noise_psd": self.noise_psd, "bandwidth": self.bandwidth,
            "d_min": self.d_min, "power": self.power, "bits": self.bits, "seed": self.seed,
            "semantics": self.semantics.value,
            "policies": [p.value for p in self.policies],
            "search": {"max_exhaustive_nodes": self.search.max_exhaustive_nodes,
                       "max_iterations": self.search.max_iterations,
                       "tol": self.search.tol},
            "parallelism": self.parallelism, "quantum": self.quantum,
        }


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    n_nodes: int
    sp_delay_s: float | None = None
    coop_delay_s: float | None = None
    dist_latest_delay_s: float | None = None
    dist_rr_delay_s: float | None = None
    dist_bcast_delay_s: float | None = None
    sp_energy_j: float | None = None
    coop_energy_j: float | None = None
    sp_over_coop: float | None = None
    flagged: bool = False
    # not part of the CSV schema
    flag_reason: str = ""
    coop_orthogonal_delay_s: float | None = None
    coop_broadcast_delay_s: float | None = None
    dist_energy_j: dict = field(default_factory=dict)
    dist_over_coop: dict = field(default_factory=dict)
    sp_order: tuple = ()
    coop_order: tuple = ()
    dist_orders: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    rows: tuple[TrialRow, ...]
    aggregates: dict


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRow:
    seed = trial_seed(cfg.seed, trial)
    net = generate_random_network(cfg.n_nodes, cfg.side, seed, cfg.channel, cfg.power)
    try:
        cmp = compare_routes(net, cfg.bits, cfg.search, cfg.policies, cfg.quantum)
    except (NoRoute, Stalled, InfeasibleOrder) as exc:
        return TrialRow(trial, seed, cfg.n_nodes, flagged=True,
                        flag_reason=f"{type(exc).__name__}: {exc}")
    dist = {k.value: o for k, o in cmp.distributed.items()}
    coop_sem = {s.value: r.delay for s, r in cmp.coop_by_semantics.items()}
    return TrialRow(
        trial=trial, seed=seed, n_nodes=cfg.n_nodes,
        sp_delay_s=cmp.sp.total_delay,
        coop_delay_s=cmp.coop.delay,
        dist_latest_delay_s=dist["latest"].delay if "latest" in dist else None,
        dist_rr_delay_s=dist["rr"].delay if "rr" in dist else None,
        dist_bcast_delay_s=dist["bcast"].delay if "bcast" in dist else None,
        sp_energy_j=cmp.sp.total_energy,
        coop_energy_j=cmp.coop.energy,
        sp_over_coop=cmp.ratios["sp_over_coop"],
        coop_orthogonal_delay_s=coop_sem.get("orthogonal"),
        coop_broadcast_delay_s=coop_sem.get("broadcast"),
        dist_energy_j={k: o.energy for k, o in dist.items()},
        dist_over_coop={k: cmp.ratios[f"{k}_over_coop"] for k in dist},
        sp_order=cmp.sp.nodes,
        coop_order=cmp.coop.order,
        dist_orders={k: o.decode_order for k, o in dist.items()},
    )


def _stats(values) -> dict:
    values = list(values)
    if not values:
        return {"count": 0, "mean": None, "median": None, "stddev": None, "min": None, "max": None}
    return {
        "count": len(values),
        "mean": math.fsum(values) / len(values),
        "median": statistics.median(values),
        "stddev": statistics.pstdev(values) if len(values) > 1 else 0.0,
        "min": min(values),
        "max": max(values),
    }


def aggregate(rows) -> dict:
    ok = [r for r in rows if not r.flagged]
    agg = {
        "trials": len(rows),
        "flagged": len(rows) - len(ok),
        "sp_over_coop": _stats(r.sp_over_coop for r in ok),
        "sp_delay_s": _stats(r.sp_delay_s for r in ok),
        "coop_delay_s": _stats(r.coop_delay_s for r in ok),
    }
    for kind in ("latest", "rr", "bcast"):
        delays = [getattr(r, f"dist_{kind}_delay_s") for r in ok]
        if ok and all(v is not None for v in delays):
            agg[f"dist_{kind}_delay_s"] = _stats(delays)
            agg[f"dist_{kind}_over_coop"] = _stats(r.dist_over_coop[kind] for r in ok)
    return agg


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Trials run independently (optionally in worker processes); rows are
    folded in trial order, so the report does not depend on parallelism."""
    trials = range(cfg.trials)
    if cfg.parallelism > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            rows = list(pool.map(run_trial, [cfg] * cfg.trials, trials))
    else:
        rows = [run_trial(cfg, t) for t in trials]
    flagged = sum(r.flagged for r in rows)
    if flagged > MAX_FLAGGED_FRACTION * len(rows):
        raise ExperimentError(f"{flagged} of {len(rows)} trials flagged")
    return ExperimentReport(cfg, tuple(rows), aggregate(rows))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(report: ExperimentReport, path) -> None:
    path = Path(path)
    try:
        path.write_text(csv_text(report))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_summary(report: ExperimentReport, path=None) -> str:
    """JSON text with the config and aggregates; also written to ``path``."""
    text = json.dumps({"config": report.config.to_dict(), "aggregates": report.aggregates},
                      indent=2, sort_keys=True) + "\n"
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return text


def emit_rows_json(report: ExperimentReport, path) -> None:
    """Every row field, including orders and per-policy energies."""
    rows = []
    for r in report.rows:
        d = asdict(r)
        d["sp_order"] = list(r.sp_order)
        d["coop_order"] = list(r.coop_order)
        d["dist_orders"] = {k: list(v) for k, v in r.dist_orders.items()}
        rows.append(d)
    try:
        Path(path).write_text(json.dumps(rows, indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_report(report: ExperimentReport, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "results.csv", "summary": out / "summary.json", "rows": out / "rows.json"}
    emit_csv(report, paths["csv"])
    emit_summary(report, paths["summary"])
    emit_rows_json(report, paths["rows"])
    return paths


def read_csv_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
