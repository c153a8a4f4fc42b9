"""Scenario model, versioned JSON format, and benchmark instance generators.

The on-disk format is plain JSON with units spelled out in the field names
(``*_min``, ``*_nm``, ``*_kt``) and integer minutes everywhere time appears
at the interface, so files diff cleanly and round-trip byte-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import SchemaError
from .objectives import CostConfig
from .occupancy import Sector
from .prob import TimeGrid
from .trajectory import FlightPlan, IntentVector, Segment, SpeedEnvelope

SCHEMA_VERSION = 1

CRUISE_SPEED_KT = 460.0
SECTOR_CROSSING_NM = 230.0  # 30 minutes at cruise


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: TimeGrid
    sectors: Tuple[Sector, ...]
    flights: Tuple[FlightPlan, ...]
    envelope: SpeedEnvelope
    costs: CostConfig

    def __post_init__(self):
        ids = {s.id for s in self.sectors}
        for f in self.flights:
            for sector_id, _, _ in f.sector_chain():
                if sector_id not in ids:
                    raise SchemaError(f"flight {f.id} crosses unknown sector {sector_id}")

    def sector(self, sector_id: str) -> Sector:
        for s in self.sectors:
            if s.id == sector_id:
                return s
        raise KeyError(sector_id)

    def flight(self, flight_id: str) -> FlightPlan:
        for f in self.flights:
            if f.id == flight_id:
                return f
        raise KeyError(flight_id)


def nominal_intents(scenario: Scenario) -> IntentVector:
    """Earliest departure plus nominal-speed crossings for every flight."""
    intents = {}
    for f in scenario.flights:
        targets = np.empty(f.n_waypoints)
        targets[0] = f.first_point_window[0]
        for i, seg in enumerate(f.segments):
            targets[i + 1] = targets[i] + seg.nominal_duration_min
        intents[f.id] = targets
    return intents


# ---------------------------------------------------------------------------
# JSON round trip


def to_dict(scenario: Scenario) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "name": scenario.name,
        "grid": {
            "origin_min": scenario.grid.origin,
            "horizon_bins": scenario.grid.horizon,
            "step_min": scenario.grid.step,
        },
        "envelope": {
            "slowdown_factor": scenario.envelope.slowdown_factor,
            "speedup_factor": scenario.envelope.speedup_factor,
            "stretch_factor": scenario.envelope.stretch_factor,
            "probable_len_min": scenario.envelope.probable_len_min,
            "min_first_support_min": scenario.envelope.min_first_support_min,
        },
        "costs": {
            "delay_exponent": scenario.costs.delay_exponent,
            "risk_aversion": scenario.costs.risk_aversion,
        },
        "sectors": [
            {
                "id": s.id,
                "capacity": s.capacity,
                "capacity_overrides": [list(o) for o in s.overrides],
            }
            for s in scenario.sectors
        ],
        "flights": [
            {
                "id": f.id,
                "scheduled_departure_min": f.scheduled_departure,
                "scheduled_arrival_min": f.scheduled_arrival,
                "first_point_window_min": list(f.first_point_window),
                "waypoints": [
                    {
                        "id": w.id,
                        "position": list(w.position) if w.position else None,
                        "enters_sector": w.enters_sector,
                        "exits_sector": w.exits_sector,
                    }
                    for w in f.waypoints
                ],
                "segments": [
                    {"distance_nm": s.distance_nm, "nominal_speed_kt": s.nominal_speed_kt}
                    for s in f.segments
                ],
            }
            for f in scenario.flights
        ],
    }


def canonical_json(scenario: Scenario) -> str:
    return json.dumps(to_dict(scenario), sort_keys=True, indent=2) + "\n"


def scenario_hash(scenario: Scenario) -> str:
    return hashlib.sha256(canonical_json(scenario).encode()).hexdigest()[:16]


def from_dict(data: dict) -> Scenario:
    from .trajectory import Waypoint

    if not isinstance(data, dict):
        raise SchemaError("scenario file must contain a JSON object")
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unknown scenario schema version {version!r}")
    try:
        g = data["grid"]
        grid = TimeGrid(int(g["origin_min"]), int(g["horizon_bins"]), int(g["step_min"]))
        e = data["envelope"]
        envelope = SpeedEnvelope(
            e["slowdown_factor"],
            e["speedup_factor"],
            e["stretch_factor"],
            e["probable_len_min"],
            e["min_first_support_min"],
        )
        c = data["costs"]
        costs = CostConfig(c["delay_exponent"], c["risk_aversion"])
    except KeyError as exc:
        raise SchemaError(f"missing scenario field {exc}") from None
    sectors = []
    for sd in data.get("sectors", []):
        if sd.get("capacity", -1) < 0:
            raise SchemaError(f"sector {sd.get('id')!r}: capacity must be non-negative")
        sectors.append(
            Sector(
                sd["id"],
                int(sd["capacity"]),
                tuple(tuple(o) for o in sd.get("capacity_overrides", [])),
            )
        )
    flights = []
    for fd in data.get("flights", []):
        try:
            waypoints = tuple(
                Waypoint(
                    wd["id"],
                    tuple(wd["position"]) if wd.get("position") else None,
                    wd.get("enters_sector"),
                    wd.get("exits_sector"),
                )
                for wd in fd["waypoints"]
            )
            segments = tuple(
                Segment(sd["distance_nm"], sd["nominal_speed_kt"]) for sd in fd["segments"]
            )
            flights.append(
                FlightPlan(
                    fd["id"],
                    fd["scheduled_departure_min"],
                    fd["scheduled_arrival_min"],
                    waypoints,
                    segments,
                    tuple(fd["first_point_window_min"]),
                )
            )
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"flight {fd.get('id')!r}: {exc}") from None
    try:
        return Scenario(
            data.get("name", "unnamed"), grid, tuple(sectors), tuple(flights), envelope, costs
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(scenario))


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return from_dict(data)


def apply_disruption(
    scenario: Scenario, sector_id: str, window: Tuple[float, float], new_capacity: int
) -> Scenario:
    """Return a scenario whose sector capacity drops to ``new_capacity`` in the window."""
    start, end = window
    step = scenario.grid.step
    if (start - scenario.grid.origin) % step or (end - scenario.grid.origin) % step:
        raise SchemaError(f"disruption window {window} not aligned to the {step}-minute grid")
    if not (scenario.grid.origin <= start < end <= scenario.grid.end):
        raise SchemaError(f"disruption window {window} outside the horizon")
    target = scenario.sector(sector_id)  # KeyError for unknown sector
    sectors = tuple(
        replace(s, overrides=s.overrides + ((float(start), float(end), int(new_capacity)),))
        if s.id == sector_id
        else s
        for s in scenario.sectors
    )
    return replace(scenario, sectors=sectors)


# ---------------------------------------------------------------------------
# Benchmark instances


def _crossing_flight(
    fid: str,
    dep_window: Tuple[float, float],
    arm_in: str,
    arm_out: str,
    positions: Dict[str, Tuple[float, float]],
) -> FlightPlan:
    """X-instance flight: arm sector, central sector, opposite arm.

    The first and last crossings are split into two 15-minute legs so the
    plan carries 6 waypoints (5 segments), giving each flight 6 decision
    genes: one departure offset plus five durations.
    """
    from .trajectory import Waypoint

    half = SECTOR_CROSSING_NM / 2.0
    pin = np.array(positions[arm_in])
    pout = np.array(positions[arm_out])

    def lerp(t):
        return tuple(np.round(pin + (pout - pin) * t, 3))

    waypoints = (
        Waypoint(f"{fid}-w1", lerp(0.0), enters_sector=arm_in),
        Waypoint(f"{fid}-w2", lerp(0.2)),
        Waypoint(f"{fid}-w3", lerp(0.35), exits_sector=arm_in, enters_sector="C"),
        Waypoint(f"{fid}-w4", lerp(0.65), exits_sector="C", enters_sector=arm_out),
        Waypoint(f"{fid}-w5", lerp(0.8)),
        Waypoint(f"{fid}-w6", lerp(1.0), exits_sector=arm_out),
    )
    segments = tuple(
        Segment(d, CRUISE_SPEED_KT)
        for d in (half, half, SECTOR_CROSSING_NM, half, half)
    )
    nominal_total = sum(s.nominal_duration_min for s in segments)
    return FlightPlan(
        fid,
        dep_window[0],
        dep_window[0] + nominal_total,
        waypoints,
        segments,
        dep_window,
    )


def generate_x_instance() -> Scenario:
    """Five sectors in an X with a mandatory central crossing, 10 flights.

    Capacities: 3 central, 2 northwest/southeast, 1 southwest/northeast.
    Departure windows are staggered 5 minutes apart so the all-nominal
    schedule overloads the central sector.  Decision space: 10 flights x
    (1 departure + 5 durations) = 60 genes.
    """
    positions = {"NW": (-2.0, 2.0), "NE": (2.0, 2.0), "SW": (-2.0, -2.0), "SE": (2.0, -2.0)}
    sectors = (
        Sector("NW", 2),
        Sector("NE", 1),
        Sector("C", 3),
        Sector("SW", 1),
        Sector("SE", 2),
    )
    routes = [
        ("NW", "SE"),
        ("SE", "NW"),
        ("NE", "SW"),
        ("SW", "NE"),
    ]
    route_counts = [3, 3, 2, 2]
    flights = []
    i = 0
    for (arm_in, arm_out), count in zip(routes, route_counts):
        for _ in range(count):
            window = (5.0 * i, 5.0 * i + 30.0)
            flights.append(_crossing_flight(f"F{i:02d}", window, arm_in, arm_out, positions))
            i += 1
    return Scenario(
        "x-instance",
        TimeGrid(origin=0, horizon=280, step=1),
        sectors,
        tuple(flights),
        SpeedEnvelope(),
        CostConfig(),
    )


def generate_grid_instance() -> Scenario:
    """4x4 sector grid, 10 flows of 30 flights, each crossing 4 sectors.

    Flows come from the north (one per column), from the east (one per row),
    and along the two diagonals.  Departures inside a flow are staggered 4
    minutes apart.  Capacities are set to one above the staggering-implied
    per-flow peak
    (ceil(30 min crossing / 4 min spacing) = 8 concurrent flights per flow),
    so the undisturbed scenario sits near but under capacity.
    """
    from .trajectory import Waypoint

    def sector_id(r: int, c: int) -> str:
        return f"S{r}{c}"

    flows: List[Tuple[str, List[str]]] = []
    for c in range(4):
        flows.append((f"N{c}", [sector_id(r, c) for r in range(4)]))
    for r in range(4):
        flows.append((f"E{r}", [sector_id(r, c) for c in range(3, -1, -1)]))
    flows.append(("DNW", [sector_id(k, k) for k in range(4)]))
    flows.append(("DSE", [sector_id(3 - k, 3 - k) for k in range(4)]))

    flow_load: Dict[str, int] = {}
    for _, chain in flows:
        for sid in chain:
            flow_load[sid] = flow_load.get(sid, 0) + 1
    per_flow_peak = int(np.ceil(30.0 / 4.0))  # concurrent flights of one flow
    sectors = tuple(
        Sector(sector_id(r, c), per_flow_peak * flow_load[sector_id(r, c)] + 1)
        for r in range(4)
        for c in range(4)
    )

    flights = []
    for flow_name, chain in flows:
        for j in range(30):
            fid = f"{flow_name}-{j:02d}"
            window = (4.0 * j, 4.0 * j + 30.0)
            waypoints = [Waypoint(f"{fid}-w1", None, enters_sector=chain[0])]
            for k in range(1, 4):
                waypoints.append(
                    Waypoint(f"{fid}-w{k+1}", None, exits_sector=chain[k - 1], enters_sector=chain[k])
                )
            waypoints.append(Waypoint(f"{fid}-w5", None, exits_sector=chain[3]))
            segments = tuple(Segment(SECTOR_CROSSING_NM, CRUISE_SPEED_KT) for _ in range(4))
            flights.append(
                FlightPlan(
                    fid,
                    window[0],
                    window[0] + 120.0,
                    tuple(waypoints),
                    segments,
                    window,
                )
            )
    return Scenario(
        "grid-instance",
        TimeGrid(origin=0, horizon=340, step=1),
        sectors,
        tuple(flights),
        SpeedEnvelope(),
        CostConfig(),
    )
