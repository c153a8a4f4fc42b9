"""Batched genome evaluation: all flights propagated in one numpy pass.

Same math as :mod:`flowcap.trajectory` / :mod:`flowcap.occupancy`, but with
the flight axis vectorized so one cost evaluation is a handful of array ops
instead of thousands of small ones.  Requires every flight in the scenario to
have the same number of waypoints (true for both benchmark instances);
heterogeneous scenarios fall back to the scalar path in
:class:`flowcap.objectives.Evaluator`.

Tests cross-check this engine against the scalar reference implementation.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np

from .errors import HorizonOverflowError, NormalizationError
from .objectives import ObjectivePoint, congestion_cost_from_pmf
from .occupancy import PRESENCE_EPS, congestion_pmf_matrix
from .prob import triangular_cdf
from .trajectory import feasible_bounds

_EDGE_EPS = 1e-12


class BatchEvaluator:
    """Maps genomes (or absolute target matrices) to (C1, C2) for one scenario."""

    def __init__(self, scenario, method: str = "auto"):
        self.scenario = scenario
        self.method = method
        flights = scenario.flights
        n_wp = {f.n_waypoints for f in flights}
        if len(n_wp) != 1:
            raise ValueError("batched evaluation needs a homogeneous waypoint count")
        self.n_wp = n_wp.pop()
        self.n_seg = self.n_wp - 1
        self.n_flights = len(flights)
        env = scenario.envelope

        self.win_lo = np.array([f.first_point_window[0] for f in flights])
        self.win_hi = np.array([f.first_point_window[1] for f in flights])
        # departure support, widened to the minimum first-point support
        width = self.win_hi - self.win_lo
        center = 0.5 * (self.win_lo + self.win_hi)
        need = width < env.min_first_support_min
        self.dep_lo = np.where(need, center - 0.5 * env.min_first_support_min, self.win_lo)
        self.dep_hi = np.where(need, center + 0.5 * env.min_first_support_min, self.win_hi)

        bounds = [feasible_bounds(f, env) for f in flights]
        self.dur_lo = np.array([[b for b, _ in fb.segment_durations] for fb in bounds])
        self.dur_hi = np.array([[b for _, b in fb.segment_durations] for fb in bounds])
        self.arrival = np.array([f.scheduled_arrival for f in flights])
        self.half_probable = 0.5 * env.probable_len_min

        # sector membership: (flight row, entry waypoint, exit waypoint)
        self.sector_members: Dict[str, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self.capacity: Dict[str, np.ndarray] = {}
        row_of = {f.id: i for i, f in enumerate(flights)}
        for sector in scenario.sectors:
            rows, w_in, w_out = [], [], []
            for f in flights:
                for sid, i_in, i_out in f.sector_chain():
                    if sid == sector.id:
                        rows.append(row_of[f.id])
                        w_in.append(i_in)
                        w_out.append(i_out)
            self.sector_members[sector.id] = (
                np.array(rows, int),
                np.array(w_in, int),
                np.array(w_out, int),
            )
            self.capacity[sector.id] = sector.capacity_profile(scenario.grid)

    # -- decoding ----------------------------------------------------------

    def decode_matrix(self, genome: np.ndarray) -> np.ndarray:
        """Genome to (flights, waypoints) absolute target times."""
        genes = np.asarray(genome, float).reshape(self.n_flights, 1 + self.n_seg)
        T = np.empty((self.n_flights, self.n_wp))
        T[:, 0] = self.win_lo + genes[:, 0] * (self.win_hi - self.win_lo)
        durations = self.dur_lo + genes[:, 1:] * (self.dur_hi - self.dur_lo)
        T[:, 1:] = T[:, 0:1] + np.cumsum(durations, axis=1)
        return T

    def intents_matrix(self, intents: Dict[str, np.ndarray]) -> np.ndarray:
        return np.vstack([np.asarray(intents[f.id], float) for f in self.scenario.flights])

    # -- propagation -------------------------------------------------------

    def propagate(self, T: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Per-waypoint marginals as (offsets (F,), mass (F, width)) pairs."""
        grid = self.scenario.grid
        origin, step, B = grid.origin, grid.step, grid.horizon

        mode = np.clip(T[:, 0], self.dep_lo, self.dep_hi)
        lo_bin = np.floor((self.dep_lo - origin) / step).astype(int)
        hi_bin = np.floor((self.dep_hi - origin) / step - _EDGE_EPS).astype(int)
        if lo_bin.min() < 0 or hi_bin.max() >= B:
            raise HorizonOverflowError("departure window outside the horizon")
        W = int((hi_bin - lo_bin).max()) + 1
        edges = origin + (lo_bin[:, None] + np.arange(W + 1)) * step
        Fc = triangular_cdf(edges, self.dep_lo[:, None], mode[:, None], self.dep_hi[:, None])
        M = np.diff(Fc, axis=1)
        out = [(lo_bin, M)]

        for i in range(self.n_seg):
            o, M = out[-1]
            S = M.shape[1]
            t_mid = origin + (o[:, None] + np.arange(S) + 0.5) * step
            feas_lo = t_mid + self.dur_lo[:, i : i + 1]
            feas_hi = t_mid + self.dur_hi[:, i : i + 1]
            mode = np.clip(T[:, i + 1][:, None], feas_lo, feas_hi)
            plo = np.maximum(mode - self.half_probable, feas_lo)
            plo = np.maximum(plo, t_mid + 0.5 * step)  # arrow of time: next bin at least
            phi = np.minimum(mode + self.half_probable, feas_hi)
            phi = np.maximum(phi, plo)
            mode = np.clip(mode, plo, phi)

            valid = M > 0
            plo_eff = np.where(valid, plo, np.inf)
            phi_eff = np.where(valid, phi, -np.inf)
            new_lo = np.floor((plo_eff.min(axis=1) - origin) / step).astype(int)
            new_hi = np.floor((phi_eff.max(axis=1) - origin) / step - _EDGE_EPS).astype(int)
            if new_hi.max() >= B:
                raise HorizonOverflowError(
                    f"marginal support reaches bin {new_hi.max()} beyond horizon {B}"
                )
            m = int((new_hi - new_lo).max()) + 1
            edges = origin + (new_lo[:, None] + np.arange(m + 1)) * step
            Fc = triangular_cdf(
                edges[:, :, None], plo[:, None, :], mode[:, None, :], phi[:, None, :]
            )
            K = np.diff(Fc, axis=1)
            newM = np.einsum("fms,fs->fm", K, M)
            totals = newM.sum(axis=1)
            if np.abs(totals - 1.0).max() > 1e-9:
                raise NormalizationError("batched propagation lost probability mass")
            newM /= totals[:, None]
            out.append((new_lo, newM))
        return out

    def waypoint_cdfs(self, marginals) -> np.ndarray:
        """(waypoints, flights, bins) dense CDF stack."""
        grid = self.scenario.grid
        out = np.zeros((self.n_wp, self.n_flights, grid.horizon))
        rows = np.arange(self.n_flights)[:, None]
        for w, (o, M) in enumerate(marginals):
            cols = o[:, None] + np.arange(M.shape[1])
            out[w][rows, cols] = M
            np.cumsum(out[w], axis=1, out=out[w])
        return out

    # -- objectives --------------------------------------------------------

    def c1_from_marginals(self, marginals) -> float:
        grid = self.scenario.grid
        o, M = marginals[-1]
        mids = grid.origin + (o[:, None] + np.arange(M.shape[1]) + 0.5) * grid.step
        delay = np.maximum(mids - self.arrival[:, None], 0.0)
        return float((delay**self.scenario.costs.delay_exponent * M).sum())

    def c2_from_cdfs(self, cdfs: np.ndarray) -> float:
        lam = self.scenario.costs.risk_aversion
        step = self.scenario.grid.step
        total = 0.0
        for sector_id, (rows, w_in, w_out) in self.sector_members.items():
            if len(rows) == 0:
                continue
            P = cdfs[w_in, rows] - cdfs[w_out, rows]
            cap = self.capacity[sector_id]
            hot = (P > PRESENCE_EPS).sum(axis=0) > cap
            if not hot.any():
                continue
            pmf = congestion_pmf_matrix(P[:, hot], method=self.method)
            total += congestion_cost_from_pmf(pmf, cap[hot], lam, step)
        return total

    def evaluate_targets(self, T: np.ndarray) -> ObjectivePoint:
        marginals = self.propagate(T)
        c1 = self.c1_from_marginals(marginals)
        c2 = self.c2_from_cdfs(self.waypoint_cdfs(marginals))
        return ObjectivePoint(c1, c2)

    def evaluate(self, genome: np.ndarray) -> ObjectivePoint:
        return self.evaluate_targets(self.decode_matrix(genome))

    def evaluate_intents(self, intents: Dict[str, np.ndarray]) -> ObjectivePoint:
        return self.evaluate_targets(self.intents_matrix(intents))
