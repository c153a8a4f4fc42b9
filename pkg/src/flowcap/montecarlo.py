"""Forward-sampling validation of the closed-form inference.

Whole scenarios are sampled trajectory by trajectory with the same segment
kernels the inference path uses, then presence, occupancy, and congestion
frequencies are compared against the closed-form values.  A sampled flight
occupies a sector from its entry bin up to, but excluding, its exit bin, so
each sample sits in exactly one sector per bin (no double counting at
boundaries); the residual one-bin edge effect is absorbed by the comparison
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .trajectory import IntentVector, propagate_marginals, sample_plan_bins


@dataclass(frozen=True)
class McConfig:
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.samples <= 0:
            raise ValueError("samples must be positive")


@dataclass(frozen=True)
class McResult:
    samples: int
    # per (sector, flight): empirical per-bin presence frequency
    presence_freq: Dict[Tuple[str, str], np.ndarray]
    # per sector: empirical occupancy mean and congestion frequency
    occupancy_mean: Dict[str, np.ndarray]
    congestion_freq: Dict[str, np.ndarray]

    def binomial_bound(self, p: np.ndarray, n_sigma: float = 4.0) -> np.ndarray:
        """n_sigma * sqrt(p(1-p)/K) confidence band around a frequency."""
        p = np.clip(np.asarray(p, float), 0.0, 1.0)
        return n_sigma * np.sqrt(p * (1.0 - p) / self.samples)


def simulate(scenario, intents: IntentVector, config: McConfig) -> McResult:
    """Monte-Carlo estimate of presence, occupancy, and congestion per sector."""
    grid = scenario.grid
    B = grid.horizon
    n = config.samples
    rng = np.random.Generator(np.random.PCG64(config.seed))

    # sample every flight's waypoint bins once
    flight_bins: Dict[str, np.ndarray] = {}
    for plan in scenario.flights:
        marginals = propagate_marginals(plan, intents[plan.id], scenario.envelope, grid)
        flight_bins[plan.id] = sample_plan_bins(
            plan, intents[plan.id], scenario.envelope, grid, rng, n, marginals=marginals
        )

    presence_freq: Dict[Tuple[str, str], np.ndarray] = {}
    occupancy_mean: Dict[str, np.ndarray] = {}
    congestion_freq: Dict[str, np.ndarray] = {}
    sample_rows = np.arange(n)
    for sector in scenario.sectors:
        members: List[Tuple[str, np.ndarray, np.ndarray]] = []
        for plan in scenario.flights:
            for sid, i_in, i_out in plan.sector_chain():
                if sid == sector.id:
                    bins = flight_bins[plan.id]
                    members.append((plan.id, bins[:, i_in], bins[:, i_out]))
        if not members:
            occupancy_mean[sector.id] = np.zeros(B)
            congestion_freq[sector.id] = np.zeros(B)
            continue
        counts = np.zeros((n, B + 1), dtype=np.int16)
        for fid, b_in, b_out in members:
            counts[sample_rows, b_in] += 1
            counts[sample_rows, np.minimum(b_out, B)] -= 1
            diff = np.zeros(B + 1)
            np.add.at(diff, b_in, 1.0)
            np.add.at(diff, np.minimum(b_out, B), -1.0)
            presence_freq[(sector.id, fid)] = np.cumsum(diff)[:B] / n
        np.cumsum(counts, axis=1, out=counts)
        counts = counts[:, :B]
        cap = sector.capacity_profile(grid)
        occupancy_mean[sector.id] = counts.mean(axis=0)
        congestion_freq[sector.id] = (counts > cap[None, :]).mean(axis=0)
    return McResult(n, presence_freq, occupancy_mean, congestion_freq)
