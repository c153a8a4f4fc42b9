import csv
import json
from pathlib import Path

import numpy as np
import pytest

from flowcap.cli import main
from flowcap.scenario import canonical_json, from_dict, to_dict


@pytest.fixture()
def x_file(tmp_path, x_scenario):
    p = tmp_path / "x.json"
    p.write_text(canonical_json(x_scenario))
    return p


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_generate_matches_golden(tmp_path, x_scenario):
    out = tmp_path / "gen.json"
    assert main(["generate", "x", "--out", str(out)]) == 0
    assert out.read_text() == canonical_json(x_scenario)


def test_generate_honors_env_dir(tmp_path, monkeypatch, x_scenario):
    monkeypatch.setenv("FLOWCAP_SCENARIO_DIR", str(tmp_path / "scen"))
    assert main(["generate", "x"]) == 0
    assert (tmp_path / "scen" / "x-instance.json").read_text() == canonical_json(x_scenario)


def test_evaluate_outputs(tmp_path, x_file):
    out = tmp_path / "eval"
    assert main(["evaluate", "--scenario", str(x_file), "--out", str(out)]) == 0
    costs = json.loads((out / "costs.json").read_text())
    assert costs["c1"] > 0 and costs["c2"] > 0
    for name, cols in [
        ("marginals.csv", {"flight", "waypoint", "bin", "time_min", "mass"}),
        ("presence.csv", {"sector", "flight", "bin", "probability"}),
        ("congestion.csv", {"sector", "bin", "expected_occupancy", "capacity", "p_congestion"}),
        ("alarms.csv", {"sector", "start_bin", "end_bin", "peak_expected", "capacity"}),
    ]:
        rows = read_csv(out / name)
        assert rows and set(rows[0]) == cols


def test_evaluate_delay_costs(tmp_path, x_scenario, x_file):
    # the same nominal intents are late against the published schedule but
    # perfectly on time once every scheduled arrival is pushed past the final
    # marginal's support
    data = to_dict(x_scenario)
    for fd in data["flights"]:
        fd["scheduled_arrival_min"] += 45.0
    roomy = tmp_path / "roomy.json"
    roomy.write_text(json.dumps(data))

    from flowcap import nominal_intents

    intents = {fid: t.tolist() for fid, t in nominal_intents(x_scenario).items()}
    intents_file = tmp_path / "intents.json"
    intents_file.write_text(json.dumps(intents))

    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["evaluate", "--scenario", str(roomy), "--intents", str(intents_file), "--out", str(out_a)]) == 0
    assert main(["evaluate", "--scenario", str(x_file), "--intents", str(intents_file), "--out", str(out_b)]) == 0
    c1_on_time = json.loads((out_a / "costs.json").read_text())["c1"]
    c1_delayed = json.loads((out_b / "costs.json").read_text())["c1"]
    assert c1_on_time == 0.0
    assert c1_delayed > 0.0


def test_validate_small(tmp_path, x_file):
    out = tmp_path / "val"
    rc = main(
        ["validate", "--scenario", str(x_file), "--samples", "5000", "--seed", "1", "--out", str(out)]
    )
    assert rc == 0
    rows = read_csv(out / "validate.csv")
    assert rows and set(rows[0]) == {
        "sector", "bin", "metric", "closed_form", "monte_carlo", "bound", "status",
    }
    summary = json.loads((out / "validate_summary.json").read_text())
    assert summary["samples"] == 5000


def test_optimize_deterministic(tmp_path, x_file):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        rc = main(
            [
                "optimize", "--scenario", str(x_file), "--seed", "7",
                "--population", "12", "--generations", "4", "--out", str(out),
            ]
        )
        assert rc == 0
        outs.append(out)
    a = (outs[0] / "archive_7.csv").read_bytes()
    b = (outs[1] / "archive_7.csv").read_bytes()
    assert a == b
    ma = json.loads((outs[0] / "run_7.json").read_text())
    mb = json.loads((outs[1] / "run_7.json").read_text())
    assert ma["archive"] == mb["archive"]
    assert ma["hypervolume_trace"] == mb["hypervolume_trace"]
    assert ma["rng"] == "numpy-PCG64" and ma["seed"] == 7


def test_bench_ordering(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "pbin", "--n-max", "64", "--out", str(out)]) == 0
    rows = read_csv(out)
    ns = [int(r["N"]) for r in rows]
    direct = [int(r["direct_ns"]) for r in rows]
    fft = [int(r["fft_ns"]) for r in rows]
    assert ns == sorted(ns)
    # direct grows with N; FFT overtakes it by N = 64
    assert direct[-1] > direct[0]
    assert fft[-1] < direct[-1]


def test_missing_scenario_is_machine_readable(tmp_path, capsys):
    rc = main(["evaluate", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "FileNotFound"


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    rc = main(["evaluate", "--scenario", str(bad), "--out", str(tmp_path / "o")])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "SchemaError"
