"""Genome decoding and the two expected-cost objectives.

A genome is a flat vector in [0,1]^n: per flight one departure gene plus one
duration gene per segment, each affinely mapped onto its feasible interval.
Feasibility therefore holds by construction and no penalty terms are needed.

The delay and congestion costs are both super-linear: the delay exponent
penalizes long delays disproportionately (equity across flights), and the
risk-aversion exponent does the same for capacity overshoot.  The two
exponents are configured separately because they are unrelated knobs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from .occupancy import (
    PRESENCE_EPS,
    congestion_pmf_matrix,
    occupancy_field,
    presence_curve_array,
)
from .prob import expectation_of
from .trajectory import FlightBounds, IntentVector, feasible_bounds, propagate_marginals


@dataclass(frozen=True)
class CostConfig:
    delay_exponent: float = 2.0
    risk_aversion: float = 2.0

    def __post_init__(self):
        if self.delay_exponent <= 1:
            raise ValueError("delay_exponent must exceed 1 (super-linear equity)")
        if self.risk_aversion < 1:
            raise ValueError("risk_aversion must be >= 1")


@dataclass(frozen=True)
class ObjectivePoint:
    c1: float  # expected delay cost
    c2: float  # expected congestion cost

    def __post_init__(self):
        if not (np.isfinite(self.c1) and np.isfinite(self.c2)):
            raise ValueError("objective values must be finite")


def dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """Pareto dominance: componentwise <= with at least one strict <."""
    return a.c1 <= b.c1 and a.c2 <= b.c2 and (a.c1 < b.c1 or a.c2 < b.c2)


def genome_length(scenario) -> int:
    return sum(1 + len(f.segments) for f in scenario.flights)


def decode(genome: np.ndarray, scenario) -> IntentVector:
    """Map a [0,1] genome onto absolute target times per flight."""
    genome = np.asarray(genome, float)
    if len(genome) != genome_length(scenario):
        raise ValueError(
            f"genome length {len(genome)} != expected {genome_length(scenario)}"
        )
    intents: IntentVector = {}
    pos = 0
    for plan in scenario.flights:
        bounds = feasible_bounds(plan, scenario.envelope)
        wlo, whi = bounds.departure_window
        targets = np.empty(plan.n_waypoints)
        targets[0] = wlo + genome[pos] * (whi - wlo)
        pos += 1
        for i, (dlo, dhi) in enumerate(bounds.segment_durations):
            targets[i + 1] = targets[i] + dlo + genome[pos] * (dhi - dlo)
            pos += 1
        intents[plan.id] = targets
    return intents


def delay_cost(marginal, scheduled_arrival: float, exponent: float) -> float:
    """Expected super-linear cost of arriving past the scheduled time."""
    return expectation_of(
        marginal, lambda t: np.maximum(t - scheduled_arrival, 0.0) ** exponent
    )


def congestion_cost_from_pmf(pmf: np.ndarray, capacity: np.ndarray, lam: float, step: float) -> float:
    """sum over bins and n > C of (n - C)^lam * Pr(K=n) * step."""
    n = np.arange(pmf.shape[0], dtype=float)[:, None]
    excess = np.maximum(n - capacity[None, :], 0.0)
    return float((excess**lam * pmf).sum() * step)


class Evaluator:
    """Caches per-scenario structure and maps genomes to (C1, C2).

    Evaluation is pure and consumes no randomness, so populations can be
    evaluated in any order (or in parallel) without touching reproducibility.
    """

    def __init__(self, scenario, method: str = "auto"):
        self.scenario = scenario
        self.method = method
        self.bounds: Dict[str, FlightBounds] = {
            f.id: feasible_bounds(f, scenario.envelope) for f in scenario.flights
        }
        self.chains = {f.id: f.sector_chain() for f in scenario.flights}
        self.capacity = {
            s.id: s.capacity_profile(scenario.grid) for s in scenario.sectors
        }
        self.sector_flights = {s.id: [] for s in scenario.sectors}
        for f in scenario.flights:
            for sector_id, i_in, i_out in self.chains[f.id]:
                self.sector_flights[sector_id].append((f.id, i_in, i_out))

    def marginals(self, intents: IntentVector) -> Dict[str, List]:
        return {
            f.id: propagate_marginals(f, intents[f.id], self.scenario.envelope, self.scenario.grid)
            for f in self.scenario.flights
        }

    def eval_c1(self, marginals: Dict[str, List]) -> float:
        exp = self.scenario.costs.delay_exponent
        total = 0.0
        for f in self.scenario.flights:
            total += delay_cost(marginals[f.id][-1], f.scheduled_arrival, exp)
        return total

    def eval_c2(self, marginals: Dict[str, List]) -> float:
        grid = self.scenario.grid
        lam = self.scenario.costs.risk_aversion
        total = 0.0
        for sector in self.scenario.sectors:
            members = self.sector_flights[sector.id]
            if not members:
                continue
            cap = self.capacity[sector.id]
            P = np.vstack(
                [
                    presence_curve_array(marginals[fid][i_in], marginals[fid][i_out], grid)
                    for fid, i_in, i_out in members
                ]
            )
            # K can only exceed capacity where more than C flights have
            # nonzero presence; restrict the PMF computation to those bins.
            hot = (P > PRESENCE_EPS).sum(axis=0) > cap
            if not hot.any():
                continue
            pmf = congestion_pmf_matrix(P[:, hot], method=self.method)
            total += congestion_cost_from_pmf(pmf, cap[hot], lam, grid.step)
        return total

    def evaluate_intents(self, intents: IntentVector) -> ObjectivePoint:
        marginals = self.marginals(intents)
        return ObjectivePoint(self.eval_c1(marginals), self.eval_c2(marginals))

    def evaluate(self, genome: np.ndarray) -> ObjectivePoint:
        return self.evaluate_intents(decode(genome, self.scenario))

    def field(self, intents: IntentVector, method: str = None):
        return occupancy_field(
            self.marginals(intents),
            self.scenario.flights,
            self.scenario.sectors,
            self.scenario.grid,
            method=method or self.method,
        )


def eval_c1(intents: IntentVector, scenario) -> float:
    ev = Evaluator(scenario)
    return ev.eval_c1(ev.marginals(intents))


def eval_c2(intents: IntentVector, scenario, method: str = "auto") -> float:
    ev = Evaluator(scenario, method=method)
    return ev.eval_c2(ev.marginals(intents))
