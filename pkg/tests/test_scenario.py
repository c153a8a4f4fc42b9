import json
from pathlib import Path

import numpy as np
import pytest

from flowcap import (
    Evaluator,
    apply_disruption,
    generate_grid_instance,
    generate_x_instance,
    load_scenario,
    monitor_alarms,
    nominal_intents,
    save_scenario,
    scenario_hash,
)
from flowcap.errors import SchemaError
from flowcap.objectives import genome_length
from flowcap.scenario import canonical_json, from_dict, to_dict

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "scenarios"


def test_x_instance_shape(x_scenario):
    assert len(x_scenario.sectors) == 5
    assert len(x_scenario.flights) == 10
    assert x_scenario.sector("C").capacity == 3
    caps = {s.id: s.capacity for s in x_scenario.sectors}
    assert caps == {"NW": 2, "NE": 1, "C": 3, "SW": 1, "SE": 2}
    assert genome_length(x_scenario) == 60


def test_x_instance_every_flight_crosses_center(x_scenario):
    for f in x_scenario.flights:
        sectors = [sid for sid, _, _ in f.sector_chain()]
        assert len(sectors) == 3 and sectors[1] == "C"


def test_x_instance_nominal_overloads_center(x_nominal_field):
    assert x_nominal_field.sectors["C"].expected.max() > 3.0


def test_grid_instance_shape(grid_scenario):
    assert len(grid_scenario.flights) == 300
    assert len(grid_scenario.sectors) == 16
    for f in grid_scenario.flights:
        assert len(f.sector_chain()) == 4


def test_generators_deterministic():
    assert canonical_json(generate_x_instance()) == canonical_json(generate_x_instance())
    assert canonical_json(generate_grid_instance()) == canonical_json(generate_grid_instance())


def test_golden_files_match_generators(x_scenario, grid_scenario):
    assert (GOLDEN_DIR / "x-instance.json").read_text() == canonical_json(x_scenario)
    assert (GOLDEN_DIR / "grid-instance.json").read_text() == canonical_json(grid_scenario)


def test_round_trip(tmp_path, x_scenario):
    p = tmp_path / "x.json"
    save_scenario(x_scenario, p)
    loaded = load_scenario(p)
    assert loaded == x_scenario
    # canonical re-save is byte identical
    p2 = tmp_path / "x2.json"
    save_scenario(loaded, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_negative_capacity_names_sector(x_scenario):
    data = to_dict(x_scenario)
    data["sectors"][2]["capacity"] = -1
    with pytest.raises(SchemaError) as err:
        from_dict(data)
    assert "C" in str(err.value)


def test_inconsistent_sector_chain_rejected(x_scenario):
    data = to_dict(x_scenario)
    # make a waypoint exit a sector that was never entered
    data["flights"][0]["waypoints"][2]["exits_sector"] = "SE"
    with pytest.raises(SchemaError):
        from_dict(data)


def test_unknown_schema_version(x_scenario):
    data = to_dict(x_scenario)
    data["version"] = 99
    with pytest.raises(SchemaError):
        from_dict(data)


def test_invalid_json_diagnostics(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_scenario(p)


def test_disruption_triggers_alarms(x_scenario):
    disrupted = apply_disruption(x_scenario, "C", (60.0, 120.0), 1)
    ev = Evaluator(disrupted)
    alarms = monitor_alarms(ev.field(nominal_intents(disrupted)))
    hits = [a for a in alarms if a.sector_id == "C" and a.capacity == 1.0]
    assert hits
    covered = set()
    for a in hits:
        covered.update(range(a.start_bin, a.end_bin + 1))
    # the busy part of the disrupted window is alarmed
    assert set(range(60, 116)).issubset(covered)


def test_disruption_same_capacity_equivalent(x_scenario):
    same = apply_disruption(x_scenario, "C", (60.0, 120.0), 3)
    grid = x_scenario.grid
    assert np.array_equal(
        same.sector("C").capacity_profile(grid), x_scenario.sector("C").capacity_profile(grid)
    )


def test_disjoint_disruptions_compose(x_scenario):
    a = apply_disruption(x_scenario, "C", (30.0, 60.0), 2)
    b = apply_disruption(a, "C", (100.0, 140.0), 1)
    prof = b.sector("C").capacity_profile(x_scenario.grid)
    assert prof[45] == 2 and prof[120] == 1 and prof[80] == 3


def test_disruption_validation(x_scenario):
    with pytest.raises(KeyError):
        apply_disruption(x_scenario, "XX", (30.0, 60.0), 1)
    with pytest.raises(SchemaError):
        apply_disruption(x_scenario, "C", (30.5, 60.0), 1)
    with pytest.raises(SchemaError):
        apply_disruption(x_scenario, "C", (30.0, 9999.0), 1)


def test_disruption_changes_version_hash(x_scenario):
    disrupted = apply_disruption(x_scenario, "C", (60.0, 120.0), 1)
    assert scenario_hash(disrupted) != scenario_hash(x_scenario)
    assert x_scenario.sector("C").overrides == ()  # original untouched
