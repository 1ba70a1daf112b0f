#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import json

import pytest

from avnmp_engine.handlers.avnmp_utility import read_csv, write_samples_csv
from avnmp_engine.handlers.metrics import SERIES_NAMES
from avnmp_engine.main import EXIT_OK, EXIT_USAGE, AVNMPEngine, main
from avnmp_engine.models.hypothesis import TimedSample


@pytest.fixture
def reference(scenarios_dir):
    return str(scenarios_dir / "reference.ini")


@pytest.fixture
def linear_trace(tmp_path):
    return write_samples_csv(
        tmp_path / "linear.csv", (TimedSample(float(t), 3.0 * t) for t in range(32))
    )


def test_simulate_is_reproducible(tmp_path, reference):
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        assert main(["simulate", reference, "--out", str(out), "--set", "window.duration=300"]) == EXIT_OK

    written = sorted(path.name for path in first.iterdir())
    assert "events.jsonl" in written
    assert {f"{name}.csv" for name in SERIES_NAMES} <= set(written)
    assert written == sorted(path.name for path in second.iterdir())
    for name in written:
        if name != "run.json":
            assert (first / name).read_bytes() == (second / name).read_bytes()

    summary = json.loads((first / "run.json").read_text())
    assert summary["scenario"]["duration"] == 300
    assert summary["counters"]["virtual_messages"] > 0


def test_simulate_seed_flag_changes_the_run(tmp_path, reference):
    args = ["simulate", reference, "--set", "window.duration=120"]
    assert main([*args, "--out", str(tmp_path / "a"), "--seed", "1"]) == EXIT_OK
    assert main([*args, "--out", str(tmp_path / "b"), "--seed", "2"]) == EXIT_OK
    assert json.loads((tmp_path / "a" / "run.json").read_text())["seed"] == 1
    assert (tmp_path / "a" / "events.jsonl").read_bytes() != (tmp_path / "b" / "events.jsonl").read_bytes()


@pytest.mark.parametrize(
    "override",
    [
        "tolerance.factor=2",
        "bogus.key=1",
        "window.lambda=10",
        "workload.kind=trace",
    ],
)
def test_simulate_rejects_bad_scenarios(tmp_path, reference, override, capsys):
    assert main(["simulate", reference, "--out", str(tmp_path), "--set", override]) == EXIT_USAGE
    assert "avnmp simulate:" in capsys.readouterr().err


def test_simulate_missing_workload_trace(tmp_path, reference):
    args = ["simulate", reference, "--out", str(tmp_path)]
    args += ["--set", "workload.kind=trace", "--set", "workload.trace=missing.csv"]
    assert main(args) == EXIT_USAGE


def test_simulate_missing_scenario_file(tmp_path):
    assert main(["simulate", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == EXIT_USAGE


def test_mdl_table(tmp_path, linear_trace, capsys):
    assert main(["mdl", str(linear_trace), "--grid", "1,2,4", "--out", str(tmp_path)]) == EXIT_OK

    rows = read_csv(tmp_path / "mdl.csv")
    assert [row["w"] for row in rows] == ["1", "2", "4"]
    assert [row["w"] for row in rows if row["selected"] == "1"] == ["1"]
    assert capsys.readouterr().out.count(" *") == 1


def test_mdl_empty_trace(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("time_s,value\n")
    assert main(["mdl", str(empty)]) == EXIT_USAGE


def test_mdl_bad_grid(linear_trace):
    with pytest.raises(SystemExit) as exit_info:
        main(["mdl", str(linear_trace), "--grid", "0,x"])
    assert exit_info.value.code == EXIT_USAGE


def test_pidemo_table(tmp_path):
    assert main(["pidemo", "--precision", "10", "--capacity", "1=200", "--out", str(tmp_path)]) == EXIT_OK

    rows = read_csv(tmp_path / "pidemo.csv")
    assert [row["link"] for row in rows] == ["1", "2", "3", "4"]
    assert rows[0]["capacity"] == "200.0"
    assert all(row["algorithmic_bytes"] == "22" for row in rows)
    assert float(rows[0]["algorithmic_s"]) == pytest.approx(22 / 200)
    assert float(rows[1]["static_s"]) == pytest.approx(int(rows[1]["static_bytes"]) / 100)

    traversals = read_csv(tmp_path / "transmission.csv")
    assert [row["link_id"] for row in traversals] == ["1", "2", "3", "4", "4", "3", "2", "1"]
    assert float(traversals[0]["transit_s"]) == pytest.approx(22 / 200)


def test_pidemo_with_topology_file(logger, scenarios_dir):
    engine = AVNMPEngine(logger)
    rows = engine.pidemo(1000, topology_path=scenarios_dir / "pi_topology.ini")
    assert [row[:4] for row in rows] == [
        [1, 100.0, 22, 1001],
        [2, 100.0, 22, 1001],
        [3, 1000.0, 22, 1001],
        [4, 1000.0, 22, 1001],
    ]


def test_pidemo_precision_must_be_positive():
    assert main(["pidemo", "--precision", "0"]) == EXIT_USAGE


def test_kmap_outputs(tmp_path, scenarios_dir):
    graph = str(scenarios_dir / "system_under_attack.ini")
    assert main(["kmap", graph, "--mode", "flow", "--out", str(tmp_path)]) == EXIT_OK

    levels = {row["node"]: float(row["level"]) for row in read_csv(tmp_path / "levels.csv")}
    assert max(levels, key=levels.get) == "C"
    surface = {row["node"]: float(row["height"]) for row in read_csv(tmp_path / "surface.csv")}
    assert surface["C"] == pytest.approx(-levels["C"])

    paths = read_csv(tmp_path / "min_paths.csv")
    start_row = next(row for row in paths if row["node"] == "START")
    heights = {node: float(start_row[node]) for node in levels if node != "START"}
    assert min(heights, key=heights.get) == "E"
    assert heights["C"] > heights["E"]
    assert next(row for row in paths if row["node"] == "C")["START"] == "inf"


def test_kmap_unknown_mode(tmp_path, scenarios_dir):
    with pytest.raises(SystemExit) as exit_info:
        main(["kmap", str(scenarios_dir / "system_under_attack.ini"), "--mode", "height"])
    assert exit_info.value.code == EXIT_USAGE


def test_kmap_missing_graph(tmp_path):
    assert main(["kmap", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == EXIT_USAGE
