"""Single-session HTTP service around the planning engine.

Holds one scenario plus one committed schedule in memory.  Every scenario
mutation bumps an opaque version hash; optimization runs record the version
they started from and commits against a newer version are rejected with 409.
Optimization runs execute on a background thread and are polled via
``GET /runs/{id}``.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import FlowcapError, SchemaError
from .nsga2 import MoeaConfig, run as moea_run
from .objectives import Evaluator, decode
from .occupancy import monitor_alarms
from .scenario import (
    Scenario,
    apply_disruption,
    from_dict,
    generate_x_instance,
    nominal_intents,
    scenario_hash,
    to_dict,
)

FRONTEND_DIST = Path(__file__).resolve().parents[2] / "frontend" / "dist"


def _make_evaluator(scenario: Scenario):
    from .batch import BatchEvaluator

    try:
        return BatchEvaluator(scenario)
    except ValueError:
        return Evaluator(scenario)


@dataclass
class RunState:
    id: str
    status: str  # queued | running | done | failed
    scenario_version: str
    config: MoeaConfig
    generation: int = 0
    error: Optional[str] = None
    archive: Optional[list] = None
    genomes: Optional[np.ndarray] = None
    hypervolume_trace: Optional[list] = None
    reference_point: Optional[list] = None


@dataclass
class AppState:
    scenario: Scenario
    version: str = ""
    intents: dict = field(default_factory=dict)
    committed_genome: Optional[np.ndarray] = None
    runs: Dict[str, RunState] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    evaluator: object = None

    def reset_scenario(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self.version = scenario_hash(scenario)
        self.intents = nominal_intents(scenario)
        self.committed_genome = None
        self.evaluator = _make_evaluator(scenario)

    def baseline_costs(self):
        # evaluate the committed genome itself when one exists, so the costs
        # echoed here are bit-identical to the archive entry it came from
        if self.committed_genome is not None:
            return self.evaluator.evaluate(self.committed_genome)
        return self.evaluator.evaluate_intents(self.intents)


class DisruptionBody(BaseModel):
    sector_id: str
    from_min: float
    to_min: float
    capacity: int


class OptimizeBody(BaseModel):
    seed: int = 0
    population: int = 100
    generations: int = 400


class CommitBody(BaseModel):
    run_id: str
    index: int
    scenario_version: str


def _prob_exceed(sf) -> np.ndarray:
    n = np.arange(sf.pmf.shape[0], dtype=float)[:, None]
    return ((n > sf.capacity[None, :]) * sf.pmf).sum(axis=0)


def create_app(scenario: Optional[Scenario] = None) -> FastAPI:
    app = FastAPI(
        title="flowcap",
        description=(
            "Probabilistic flow-and-capacity planning: load a scenario, apply "
            "capacity disruptions, run the bi-objective schedule optimizer in "
            "the background, and commit a solution from its Pareto archive."
        ),
    )
    state = AppState(scenario=None)
    state.reset_scenario(scenario if scenario is not None else generate_x_instance())

    # ------------------------------------------------------------------ scenario

    @app.get("/scenario")
    def get_scenario():
        return {"version": state.version, "scenario": to_dict(state.scenario)}

    @app.post("/scenario")
    def post_scenario(body: dict):
        try:
            sc = from_dict(body)
        except (SchemaError, FlowcapError, ValueError) as exc:
            raise HTTPException(422, detail=str(exc))
        with state.lock:
            state.reset_scenario(sc)
        return {"version": state.version}

    @app.post("/disruption")
    def post_disruption(body: DisruptionBody):
        try:
            sc = apply_disruption(
                state.scenario, body.sector_id, (body.from_min, body.to_min), body.capacity
            )
        except (FlowcapError, ValueError, KeyError) as exc:
            raise HTTPException(422, detail=str(exc))
        with state.lock:
            old_intents = state.intents
            old_genome = state.committed_genome
            state.reset_scenario(sc)
            # capacities changed, the committed schedule did not
            state.intents = old_intents
            state.committed_genome = old_genome
        return {"version": state.version}

    # ----------------------------------------------------------------- inference

    @app.get("/occupancy")
    def get_occupancy(sector: Optional[str] = None, from_bin: int = 0, to_bin: Optional[int] = None):
        ev = Evaluator(state.scenario)
        fld = ev.field(state.intents)
        hi = state.scenario.grid.horizon if to_bin is None else min(to_bin, state.scenario.grid.horizon)
        lo = max(from_bin, 0)
        wanted = [sector] if sector is not None else list(fld.sectors)
        sectors = {}
        for sid in wanted:
            if sid not in fld.sectors:
                raise HTTPException(404, detail=f"unknown sector {sid!r}")
            sf = fld.sectors[sid]
            sectors[sid] = {
                "expected": sf.expected[lo:hi].tolist(),
                "capacity": sf.capacity[lo:hi].tolist(),
                "p_congestion": _prob_exceed(sf)[lo:hi].tolist(),
            }
        pt = state.baseline_costs()
        alarms = [
            {
                "sector_id": a.sector_id,
                "start_bin": a.start_bin,
                "end_bin": a.end_bin,
                "peak_expected": a.peak_expected,
                "capacity": a.capacity,
            }
            for a in monitor_alarms(fld)
        ]
        return {
            "version": state.version,
            "from_bin": lo,
            "to_bin": hi,
            "costs": {"c1": pt.c1, "c2": pt.c2},
            "sectors": sectors,
            "alarms": alarms,
        }

    @app.get("/flights/{flight_id}/marginals")
    def get_marginals(flight_id: str):
        try:
            plan = state.scenario.flight(flight_id)
        except KeyError:
            raise HTTPException(404, detail=f"unknown flight {flight_id!r}")
        from .trajectory import propagate_marginals

        margs = propagate_marginals(
            plan, state.intents[flight_id], state.scenario.envelope, state.scenario.grid
        )
        return {
            "version": state.version,
            "flight_id": flight_id,
            "targets": np.asarray(state.intents[flight_id], float).tolist(),
            "waypoints": [
                {
                    "index": w,
                    "waypoint_id": plan.waypoints[w].id,
                    "support_lo": pdf.support_lo,
                    "mass": pdf.mass.tolist(),
                    "mean_time": pdf.mean_time(),
                }
                for w, pdf in enumerate(margs)
            ],
        }

    # --------------------------------------------------------------- optimization

    def _worker(rs: RunState):
        try:
            evaluator = state.evaluator
            n_genes = sum(1 + len(f.segments) for f in state.scenario.flights)

            def evaluate(genome):
                pt = evaluator.evaluate(genome)
                return (pt.c1, pt.c2)

            def progress(gen):
                rs.generation = gen + 1

            rs.status = "running"
            result = moea_run(n_genes, evaluate, rs.config, progress=progress)
            rs.archive = [
                {"index": i, "c1": float(p[0]), "c2": float(p[1])}
                for i, p in enumerate(result.archive_points)
            ]
            rs.genomes = result.archive_genomes
            rs.hypervolume_trace = result.hypervolume_trace
            rs.reference_point = list(result.reference_point)
            rs.status = "done"
        except Exception as exc:  # surfaced through GET /runs/{id}
            rs.error = f"{type(exc).__name__}: {exc}"
            rs.status = "failed"

    @app.post("/optimize")
    def post_optimize(body: OptimizeBody):
        config = MoeaConfig(
            population=body.population, generations=body.generations, seed=body.seed
        )
        rs = RunState(
            id=uuid.uuid4().hex[:12],
            status="queued",
            scenario_version=state.version,
            config=config,
        )
        with state.lock:
            state.runs[rs.id] = rs
        threading.Thread(target=_worker, args=(rs,), daemon=True).start()
        return {"run_id": rs.id, "status": rs.status, "scenario_version": rs.scenario_version}

    def _run_or_404(run_id: str) -> RunState:
        rs = state.runs.get(run_id)
        if rs is None:
            raise HTTPException(404, detail=f"unknown run {run_id!r}")
        return rs

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        rs = _run_or_404(run_id)
        out = {
            "run_id": rs.id,
            "status": rs.status,
            "scenario_version": rs.scenario_version,
            "generation": rs.generation,
            "generations": rs.config.generations,
            "seed": rs.config.seed,
        }
        if rs.status == "failed":
            out["error"] = rs.error
        if rs.status == "done":
            out["archive"] = rs.archive
            out["hypervolume_trace"] = rs.hypervolume_trace
            out["reference_point"] = rs.reference_point
        return out

    @app.get("/runs/{run_id}/suggestion")
    def get_suggestion(run_id: str):
        """Knee-point pick: closest archive member to the ideal point after
        min-max normalization.  A heuristic, not part of the model."""
        rs = _run_or_404(run_id)
        if rs.status != "done":
            raise HTTPException(409, detail=f"run is {rs.status}, not done")
        pts = np.array([[a["c1"], a["c2"]] for a in rs.archive])
        span = np.maximum(pts.max(axis=0) - pts.min(axis=0), 1e-12)
        norm = (pts - pts.min(axis=0)) / span
        idx = int(np.argmin(np.linalg.norm(norm, axis=1)))
        return {"run_id": rs.id, "heuristic": True, "index": idx, "solution": rs.archive[idx]}

    @app.post("/commit")
    def post_commit(body: CommitBody):
        rs = _run_or_404(body.run_id)
        if rs.status != "done":
            raise HTTPException(409, detail=f"run is {rs.status}, not done")
        with state.lock:
            if body.scenario_version != state.version or rs.scenario_version != state.version:
                raise HTTPException(
                    409,
                    detail="scenario changed since this run started; re-optimize",
                )
            if not (0 <= body.index < len(rs.genomes)):
                raise HTTPException(422, detail=f"archive index {body.index} out of range")
            genome = rs.genomes[body.index]
            state.intents = decode(genome, state.scenario)
            state.committed_genome = genome.copy()
            pt = state.evaluator.evaluate(genome)
        return {
            "version": state.version,
            "run_id": rs.id,
            "index": body.index,
            "costs": {"c1": pt.c1, "c2": pt.c2},
        }

    if FRONTEND_DIST.is_dir():
        app.mount("/", StaticFiles(directory=str(FRONTEND_DIST), html=True), name="console")

    return app
