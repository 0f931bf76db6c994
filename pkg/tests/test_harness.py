import json
import math
import statistics

import pytest

from miarouting import harness
from miarouting.baseline import NoRoute
from miarouting.harness import (CSV_COLUMNS, ExperimentConfig, ExperimentError, TrialRow,
                                aggregate, csv_text, emit_csv, emit_summary, read_csv_rows,
                                run_experiment, run_trial, write_report)
from miarouting.prng import trial_seed

TOL = 1e-9
SMALL = dict(trials=6, n_nodes=8, side=100.0, seed=5)


@pytest.fixture(scope="module")
def small_report():
    return run_experiment(ExperimentConfig(**SMALL))


def test_two_node_single_trial():
    rep = run_experiment(ExperimentConfig(trials=1, n_nodes=2))
    assert len(rep.rows) == 1
    row = rep.rows[0]
    assert not row.flagged
    assert row.sp_over_coop == pytest.approx(1.0, rel=1e-12)
    for v in row.dist_over_coop.values():
        assert v == pytest.approx(1.0, rel=1e-12)
    assert rep.aggregates["sp_over_coop"]["stddev"] == 0.0


def test_rows_use_mixed_trial_seeds(small_report):
    assert [r.trial for r in small_report.rows] == list(range(6))
    assert [r.seed for r in small_report.rows] == [trial_seed(5, t) for t in range(6)]


def test_same_config_same_report(small_report):
    again = run_experiment(ExperimentConfig(**SMALL))
    assert again.rows == small_report.rows
    assert csv_text(again) == csv_text(small_report)


def test_parallelism_does_not_change_bytes(small_report):
    par = run_experiment(ExperimentConfig(**SMALL, parallelism=2))
    assert csv_text(par) == csv_text(small_report)
    assert par.aggregates == small_report.aggregates


def test_row_invariants(small_report):
    for r in small_report.rows:
        assert r.sp_delay_s >= r.coop_delay_s - TOL * (1 + r.coop_delay_s)
        assert r.dist_latest_delay_s >= r.coop_orthogonal_delay_s - TOL
        assert r.dist_rr_delay_s >= r.coop_orthogonal_delay_s - TOL
        assert r.dist_bcast_delay_s >= r.coop_broadcast_delay_s - TOL * (1 + r.coop_broadcast_delay_s)
        assert r.coop_energy_j == pytest.approx(0.1 * r.coop_delay_s, rel=1e-9)


def test_csv_header_and_round_trip(small_report, tmp_path):
    path = tmp_path / "r.csv"
    emit_csv(small_report, path)
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = read_csv_rows(path)
    assert len(rows) == 6
    ratios = [float(r["sp_over_coop"]) for r in rows if r["flagged"] == "0"]
    summary = json.loads(emit_summary(small_report))
    agg = summary["aggregates"]["sp_over_coop"]
    assert math.fsum(ratios) / len(ratios) == pytest.approx(agg["mean"], rel=1e-12, abs=1e-12)
    assert statistics.median(ratios) == pytest.approx(agg["median"], rel=1e-12)
    assert statistics.pstdev(ratios) == pytest.approx(agg["stddev"], rel=1e-9, abs=1e-12)


def test_write_report_files(small_report, tmp_path):
    paths = write_report(small_report, tmp_path / "out")
    assert {p.name for p in paths.values()} == {"results.csv", "summary.json", "rows.json"}
    rows = json.loads(paths["rows"].read_text())
    assert rows[0]["coop_order"][0] == 0 and rows[0]["coop_order"][-1] == 7
    assert set(rows[0]["dist_orders"]) == {"latest", "rr", "bcast"}


def test_io_failures_name_the_path(small_report, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        emit_csv(small_report, blocker / "x.csv")


def _flag_some(monkeypatch, every):
    real = harness.compare_routes

    def fake(net, bits, *a, **k):
        fake.calls += 1
        if fake.calls % every == 0:
            raise NoRoute("forced")
        return real(net, bits, *a, **k)

    fake.calls = 0
    monkeypatch.setattr(harness, "compare_routes", fake)


def test_flagged_rows_are_recorded(monkeypatch):
    _flag_some(monkeypatch, 3)
    rep = run_experiment(ExperimentConfig(trials=6, n_nodes=4))
    flagged = [r for r in rep.rows if r.flagged]
    assert [r.trial for r in flagged] == [2, 5]
    assert "NoRoute" in flagged[0].flag_reason
    assert rep.aggregates["flagged"] == 2
    assert rep.aggregates["sp_over_coop"]["count"] == 4
    line = csv_text(rep).splitlines()[3]
    assert line.endswith(",1") and ",," in line


def test_majority_flagged_is_an_experiment_error(monkeypatch):
    _flag_some(monkeypatch, 1)
    with pytest.raises(ExperimentError):
        run_experiment(ExperimentConfig(trials=3, n_nodes=4))


def test_single_value_aggregates():
    row = TrialRow(0, 1, 2, 1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.1, 1.0, False,
                   dist_over_coop={"latest": 1.0, "rr": 1.0, "bcast": 1.0})
    agg = aggregate([row])
    assert agg["sp_over_coop"] == {"count": 1, "mean": 1.0, "median": 1.0, "stddev": 0.0,
                                   "min": 1.0, "max": 1.0}


def test_config_json_round_trip(tmp_path):
    cfg = ExperimentConfig(trials=3, n_nodes=9, semantics="broadcast", policies=["rr"],
                           search={"max_exhaustive_nodes": 5, "max_iterations": 20})
    assert cfg.search.semantics is cfg.semantics
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.load(path) == cfg


@pytest.mark.parametrize("bad", [{"trials": 0}, {"power": -1.0}, {"bits": 0},
                                 {"typo": 1}, {"policies": ["flood"]}])
def test_config_validation(bad):
    with pytest.raises((ValueError, TypeError)):
        ExperimentConfig.from_dict(bad)


def test_run_trial_matches_experiment_row(small_report):
    cfg = ExperimentConfig(**SMALL)
    assert run_trial(cfg, 4) == small_report.rows[4]
