"""Flight-plan model and uncertainty propagation along the waypoint chain.

A flight plan is an ordered waypoint sequence with per-segment distances and
nominal speeds.  Given target overfly times (one per waypoint), each segment
carries a triangular conditional density whose mode sits at the target,
clamped into the physically feasible interval; marginals are propagated
waypoint by waypoint through the resulting Markov chain.

Convention: a timestamp sampled or conditioned on is the midpoint of its
grid bin, matching the expectation convention in :mod:`flowcap.prob`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConstraintViolationError, HorizonOverflowError, NormalizationError
from .prob import DiscretePdf, TimeGrid, TriangularSpec, discretize_triangular, triangular_cdf

MINUTES_PER_HOUR = 60.0


@dataclass(frozen=True)
class Waypoint:
    id: str
    position: Optional[Tuple[float, float]] = None
    enters_sector: Optional[str] = None
    exits_sector: Optional[str] = None


@dataclass(frozen=True)
class Segment:
    distance_nm: float
    nominal_speed_kt: float

    def __post_init__(self):
        if self.distance_nm <= 0 or self.nominal_speed_kt <= 0:
            raise ValueError("segment distance and speed must be positive")

    @property
    def nominal_duration_min(self) -> float:
        return MINUTES_PER_HOUR * self.distance_nm / self.nominal_speed_kt


@dataclass(frozen=True)
class SpeedEnvelope:
    """Speed/path-stretch factors bounding each segment duration."""

    slowdown_factor: float = 0.9  # alpha: minimum speed fraction
    speedup_factor: float = 1.05  # beta: maximum speed fraction
    stretch_factor: float = 1.05  # delta: maximum path-length fraction
    probable_len_min: float = 24.0
    min_first_support_min: float = 15.0

    def __post_init__(self):
        if not (0 < self.slowdown_factor < 1 < self.speedup_factor):
            raise ValueError("need 0 < slowdown < 1 < speedup")
        if self.stretch_factor < 1 or self.probable_len_min <= 0:
            raise ValueError("stretch_factor >= 1 and probable_len_min > 0 required")


@dataclass(frozen=True)
class FlightPlan:
    id: str
    scheduled_departure: float
    scheduled_arrival: float
    waypoints: Tuple[Waypoint, ...]
    segments: Tuple[Segment, ...]
    first_point_window: Tuple[float, float]

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("a flight plan needs at least two waypoints")
        if len(self.segments) != len(self.waypoints) - 1:
            raise ValueError("need exactly one segment per waypoint pair")
        lo, hi = self.first_point_window
        if not 5.0 <= hi - lo <= 60.0:
            raise ValueError("first-point window length must be within [5, 60] minutes")

    @property
    def n_waypoints(self) -> int:
        return len(self.waypoints)

    def sector_chain(self) -> List[Tuple[str, int, int]]:
        """Sectors crossed, as (sector_id, entry_waypoint_idx, exit_waypoint_idx)."""
        chain = []
        open_sector = None
        open_at = None
        for i, wp in enumerate(self.waypoints):
            if wp.exits_sector is not None:
                if wp.exits_sector != open_sector:
                    raise ValueError(
                        f"flight {self.id}: waypoint {wp.id} exits {wp.exits_sector} "
                        f"but {open_sector} is open"
                    )
                chain.append((open_sector, open_at, i))
                open_sector, open_at = None, None
            if wp.enters_sector is not None:
                if open_sector is not None:
                    raise ValueError(
                        f"flight {self.id}: waypoint {wp.id} enters {wp.enters_sector} "
                        f"while {open_sector} is still open"
                    )
                open_sector, open_at = wp.enters_sector, i
        if open_sector is not None:
            raise ValueError(f"flight {self.id}: sector {open_sector} never exited")
        return chain


@dataclass(frozen=True)
class FlightBounds:
    """Hard box constraints for one flight's decision variables."""

    departure_window: Tuple[float, float]
    segment_durations: Tuple[Tuple[float, float], ...]  # (min, max) minutes


# Intent targets per flight id, one timestamp per waypoint.
IntentVector = Dict[str, np.ndarray]


def feasible_bounds(plan: FlightPlan, env: SpeedEnvelope) -> FlightBounds:
    """Duration box constraints per segment plus the departure interval.

    Minimum duration flies the direct path at maximum speed; maximum duration
    flies the stretched path at minimum speed.  Durations compose
    independently, so the optimizer's variables stay uncoupled.
    """
    bounds = []
    for seg in plan.segments:
        nominal = seg.nominal_duration_min
        bounds.append(
            (nominal / env.speedup_factor, env.stretch_factor * nominal / env.slowdown_factor)
        )
    return FlightBounds(plan.first_point_window, tuple(bounds))


def departure_pdf(plan: FlightPlan, target: float, env: SpeedEnvelope, grid: TimeGrid) -> DiscretePdf:
    """Triangular density of the first-waypoint time.

    The support is the first-point window, widened symmetrically about its
    center when narrower than the minimum support length; the mode is the
    departure target clamped inside.
    """
    lo, hi = plan.first_point_window
    if hi - lo < env.min_first_support_min:
        center = 0.5 * (lo + hi)
        lo = center - 0.5 * env.min_first_support_min
        hi = center + 0.5 * env.min_first_support_min
    if hi <= lo:
        return DiscretePdf.point_mass(grid, lo)
    mode = float(np.clip(target, lo, hi))
    return discretize_triangular(TriangularSpec(lo, mode, hi), grid)


def _clipped_triangle_params(t_prev, target, seg_bounds, env, grid, prev_bins=None):
    """Support and mode of the conditional given previous time(s), vectorized.

    Returns (lo, mode, hi) arrays.  The support floor is raised to the upper
    edge of the previous bin so the conditional can never place mass at or
    before the conditioning bin.
    """
    dur_lo, dur_hi = seg_bounds
    t_prev = np.asarray(t_prev, float)
    feas_lo = t_prev + dur_lo
    feas_hi = t_prev + dur_hi
    mode = np.clip(target, feas_lo, feas_hi)
    half = 0.5 * env.probable_len_min
    lo = np.maximum(mode - half, feas_lo)
    hi = np.minimum(mode + half, feas_hi)
    if prev_bins is None:
        prev_bins = grid.bin_of(t_prev)
    floor = grid.upper_edge(prev_bins).astype(float)
    lo = np.maximum(lo, floor)
    hi = np.maximum(hi, lo)  # degenerate collapses to a step at lo
    mode = np.clip(mode, lo, hi)
    return lo, mode, hi


def conditional_pdf(
    t_prev: float, target: float, seg_bounds: Tuple[float, float], env: SpeedEnvelope, grid: TimeGrid
) -> DiscretePdf:
    """Triangular conditional density of the next waypoint time.

    The mode is the target clamped into the feasible interval
    ``[t_prev + dmin, t_prev + dmax]``; the probable interval of configured
    length is centered on the mode, clipped back into the feasible interval.
    Asymmetric clipping is what skews the density toward later times.
    """
    lo, mode, hi = _clipped_triangle_params(t_prev, target, seg_bounds, env, grid)
    lo, mode, hi = float(lo), float(mode), float(hi)
    if hi <= lo:
        return DiscretePdf.point_mass(grid, lo)
    return discretize_triangular(TriangularSpec(lo, mode, hi), grid)


def segment_kernel(
    prev: DiscretePdf, target: float, seg_bounds: Tuple[float, float], env: SpeedEnvelope, grid: TimeGrid
):
    """Transition matrix of one segment over the previous marginal's support.

    Returns ``(K, out_lo)`` where ``K[j, i]`` is the probability of landing
    in bin ``out_lo + j`` given the previous time is in support bin ``i``.
    Every column sums to 1.
    """
    bins = np.arange(prev.support_lo, prev.support_hi + 1)
    t_prev = grid.midpoint(bins).astype(float)
    lo, mode, hi = _clipped_triangle_params(t_prev, target, seg_bounds, env, grid, prev_bins=bins)
    out_lo = int(grid.bin_of(lo.min()))
    out_hi = int(np.floor((hi.max() - grid.origin) / grid.step - 1e-12))
    if out_hi >= grid.horizon:
        raise HorizonOverflowError(
            f"conditional support reaches bin {out_hi} beyond horizon {grid.horizon}"
        )
    edges = grid.lower_edge(np.arange(out_lo, out_hi + 2)).astype(float)
    F = triangular_cdf(edges[:, None], lo[None, :], mode[None, :], hi[None, :])
    K = np.diff(F, axis=0)
    return K, out_lo


def check_intents(plan: FlightPlan, targets: Sequence[float], env: SpeedEnvelope, tol: float = 1e-9):
    """Validate one flight's targets against its feasible box constraints."""
    targets = np.asarray(targets, float)
    if len(targets) != plan.n_waypoints:
        raise ConstraintViolationError(
            f"flight {plan.id}: {len(targets)} targets for {plan.n_waypoints} waypoints",
            flight_id=plan.id,
        )
    bounds = feasible_bounds(plan, env)
    wlo, whi = bounds.departure_window
    if not (wlo - tol <= targets[0] <= whi + tol):
        raise ConstraintViolationError(
            f"flight {plan.id}: departure target {targets[0]} outside window [{wlo}, {whi}]",
            flight_id=plan.id,
            waypoint_index=0,
        )
    for i, (dlo, dhi) in enumerate(bounds.segment_durations):
        dur = targets[i + 1] - targets[i]
        if not (dlo - tol <= dur <= dhi + tol):
            raise ConstraintViolationError(
                f"flight {plan.id}: duration {dur:.3f} of segment {i} outside "
                f"[{dlo:.3f}, {dhi:.3f}]",
                flight_id=plan.id,
                waypoint_index=i + 1,
            )


def propagate_from(
    initial: DiscretePdf,
    plan: FlightPlan,
    targets: Sequence[float],
    start: int,
    env: SpeedEnvelope,
    grid: TimeGrid,
) -> List[DiscretePdf]:
    """Marginals from waypoint ``start`` onward, seeded with ``initial``."""
    bounds = feasible_bounds(plan, env)
    marginals = [initial]
    current = initial
    for i in range(start, plan.n_waypoints - 1):
        K, out_lo = segment_kernel(current, float(targets[i + 1]), bounds.segment_durations[i], env, grid)
        mass = K @ current.mass
        total = mass.sum()
        if abs(total - 1.0) > 1e-9:
            raise NormalizationError(f"propagated marginal sums to {total}")
        mass = mass / total  # compensate matmul float noise only
        current = DiscretePdf(grid, out_lo, out_lo + len(mass) - 1, mass).trimmed()
        marginals.append(current)
    return marginals


def propagate_marginals(
    plan: FlightPlan, targets: Sequence[float], env: SpeedEnvelope, grid: TimeGrid
) -> List[DiscretePdf]:
    """One marginal per waypoint under the Markov chain of conditionals."""
    check_intents(plan, targets, env)
    p1 = departure_pdf(plan, float(targets[0]), env, grid)
    return propagate_from(p1, plan, targets, 0, env, grid)


def sample_plan_bins(
    plan: FlightPlan,
    targets: Sequence[float],
    env: SpeedEnvelope,
    grid: TimeGrid,
    rng: np.random.Generator,
    n_samples: int,
    marginals: Optional[List[DiscretePdf]] = None,
) -> np.ndarray:
    """Forward-sample ``n_samples`` trajectories; returns (n, n_wp) bin indices.

    Sampling reuses the exact segment kernels of the propagation path, so the
    per-waypoint sample distribution is the propagated marginal by
    construction.
    """
    if marginals is None:
        marginals = propagate_marginals(plan, targets, env, grid)
    bounds = feasible_bounds(plan, env)
    out = np.empty((n_samples, plan.n_waypoints), dtype=int)
    p1 = marginals[0]
    out[:, 0] = rng.choice(
        np.arange(p1.support_lo, p1.support_hi + 1), size=n_samples, p=p1.mass
    )
    for i in range(plan.n_waypoints - 1):
        prev = marginals[i]
        K, out_lo = segment_kernel(prev, float(targets[i + 1]), bounds.segment_durations[i], env, grid)
        col_of = out[:, i] - prev.support_lo
        nxt = np.empty(n_samples, dtype=int)
        for j in np.unique(col_of):
            sel = col_of == j
            p = K[:, j]
            p = p / p.sum()
            nxt[sel] = out_lo + rng.choice(len(p), size=int(sel.sum()), p=p)
        out[:, i + 1] = nxt
    return out


def sample_plan(
    plan: FlightPlan,
    targets: Sequence[float],
    env: SpeedEnvelope,
    grid: TimeGrid,
    rng: np.random.Generator,
) -> np.ndarray:
    """One forward-sampled trajectory as bin-midpoint timestamps."""
    bins = sample_plan_bins(plan, targets, env, grid, rng, 1)[0]
    return grid.midpoint(bins).astype(float)
