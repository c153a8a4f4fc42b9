"""Sector presence and congestion inference.

Per-bin presence probabilities are evaluated at the bin's timestamp (the
interval-length-to-zero limit of the entry/exit CDF difference), which makes
the per-flight presence sum exactly one across sectors while the flight is
certainly airborne.  Congestion counts are Poisson-Binomial; the PMF comes
either from iterative Bernoulli convolution ("direct") or from sampling the
characteristic function and inverting it with an FFT.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ModelInconsistencyError, SizeCapError
from .prob import DiscretePdf, TimeGrid
from .trajectory import FlightPlan

DIRECT_CAP_DEFAULT = 20
PRESENCE_EPS = 1e-12
FFT_NEG_TOL = -1e-12


@dataclass(frozen=True)
class Sector:
    """Airspace sector with a piecewise-constant capacity over time.

    ``overrides`` are (from_min, to_min, capacity) windows applied on top of
    the base capacity; window edges must align to the grid.
    """

    id: str
    capacity: int
    overrides: Tuple[Tuple[float, float, int], ...] = ()

    def __post_init__(self):
        if self.capacity < 0 or any(c < 0 for _, _, c in self.overrides):
            raise ValueError(f"sector {self.id}: capacity must be non-negative")

    def capacity_profile(self, grid: TimeGrid) -> np.ndarray:
        prof = np.full(grid.horizon, self.capacity, dtype=float)
        for start, end, cap in self.overrides:
            b0 = int(np.round((start - grid.origin) / grid.step))
            b1 = int(np.round((end - grid.origin) / grid.step))
            prof[max(b0, 0) : min(b1, grid.horizon)] = cap
        return prof


@dataclass(frozen=True)
class PresenceCurve:
    sector_id: str
    flight_id: str
    probs: np.ndarray  # per-bin Pr(flight in sector)


@dataclass(frozen=True)
class CongestionPmf:
    sector_id: str
    bin: int
    pmf: np.ndarray  # Pr(K = n) for n = 0..N


def presence_probability(entry: DiscretePdf, exit: DiscretePdf, k: int) -> float:
    """Pr(flight inside the sector at bin k's timestamp).

    Computed as F_entry(t) - F_exit(t): the flight has passed the entry
    waypoint but not the exit one.  The arrow of time keeps this in [0, 1].
    """
    value = float(entry.cdf(k) - exit.cdf(k))
    if value < FFT_NEG_TOL:
        raise ModelInconsistencyError(
            f"negative presence {value} at bin {k}: exit precedes entry upstream"
        )
    return max(value, 0.0)


def presence_curve_array(entry: DiscretePdf, exit: DiscretePdf, grid: TimeGrid) -> np.ndarray:
    """Vectorized presence over the whole horizon."""
    ce = np.cumsum(entry.dense())
    cx = np.cumsum(exit.dense())
    out = ce - cx
    if out.min() < FFT_NEG_TOL:
        raise ModelInconsistencyError("negative presence: exit precedes entry upstream")
    return np.maximum(out, 0.0)


def congestion_pmf_enumerate(p: Sequence[float]) -> np.ndarray:
    """Literal multi-index enumeration over all 2^N subsets (test oracle)."""
    p = np.asarray(p, float)
    n = len(p)
    if n > 20:
        raise SizeCapError(f"enumeration over 2^{n} subsets refused")
    pmf = np.zeros(n + 1)
    for bits in range(1 << n):
        prob = 1.0
        ones = 0
        for f in range(n):
            if bits >> f & 1:
                prob *= p[f]
                ones += 1
            else:
                prob *= 1.0 - p[f]
        pmf[ones] += prob
    return pmf


def congestion_pmf_direct(p: Sequence[float], cap: Optional[int] = DIRECT_CAP_DEFAULT) -> np.ndarray:
    """Exact Poisson-Binomial PMF by adding one Bernoulli at a time (O(N^2)).

    Refuses more than ``cap`` flights so callers fall back to the FFT path;
    pass ``cap=None`` for benchmarking.
    """
    p = np.asarray(p, float)
    n = len(p)
    if cap is not None and n > cap:
        raise SizeCapError(f"direct path capped at {cap} flights, got {n}")
    pmf = np.zeros(n + 1)
    pmf[0] = 1.0
    for k, pf in enumerate(p):
        head = pmf[: k + 2].copy()
        pmf[: k + 2] = head * (1.0 - pf)
        pmf[1 : k + 2] += head[: k + 1] * pf
    return pmf


try:  # fused characteristic-function kernel; numpy fallback below is equivalent
    import numba as _numba

    @_numba.njit(cache=True, fastmath=True)
    def _char_samples(p, cos_w, sin_w):  # pragma: no cover - exercised via wrapper
        L = len(cos_w)
        re = np.ones(L)
        im = np.zeros(L)
        for f in range(len(p)):
            pf = p[f]
            for l in range(L):
                tr = 1.0 - pf + pf * cos_w[l]
                ti = pf * sin_w[l]
                r = re[l] * tr - im[l] * ti
                im[l] = re[l] * ti + im[l] * tr
                re[l] = r
        return re, im

except ImportError:  # pragma: no cover
    def _char_samples(p, cos_w, sin_w):
        terms = (1.0 - p[:, None]) + p[:, None] * (cos_w + 1j * sin_w)[None, :]
        while terms.shape[0] > 1:
            m = terms.shape[0]
            if m % 2:
                terms[0] = terms[0] * terms[m - 1]
                terms = terms[: m - 1]
                m -= 1
            half = m // 2
            terms = terms[:half] * terms[half:]
        return terms[0].real.copy(), terms[0].imag.copy()


def congestion_pmf_fft(p: Sequence[float]) -> np.ndarray:
    """Poisson-Binomial PMF via the characteristic function.

    Pr(K=n) = (1/(N+1)) sum_l exp(-iwln) prod_f [1 - p_f + p_f exp(iwl)]
    with w = 2*pi/(N+1).  Only the first half of the characteristic samples
    is computed (the rest follows by conjugate symmetry); the outer sum is a
    length-(N+1) DFT.
    """
    p = np.asarray(p, float)
    n = len(p)
    if n == 0:
        return np.ones(1)
    w = 2.0 * np.pi / (n + 1)
    half = n // 2 + 1 + (n % 2)  # conjugate symmetry over N+1 samples
    ang = w * np.arange(half)
    re, im = _char_samples(p, np.cos(ang), np.sin(ang))
    x = np.empty(n + 1, dtype=complex)
    x.real[:half] = re
    x.imag[:half] = im
    x[half:] = np.conj(x[1 : n + 2 - half][::-1])
    raw = np.fft.fft(x) / (n + 1)
    if np.abs(raw.imag).max() > 1e-9:
        raise ModelInconsistencyError("FFT imaginary residue above tolerance")
    pmf = raw.real
    if pmf.min() < FFT_NEG_TOL:
        raise ModelInconsistencyError(f"FFT produced negative mass {pmf.min()}")
    pmf = np.maximum(pmf, 0.0)
    return pmf / pmf.sum()


def congestion_pmf_matrix(P: np.ndarray, method: str = "auto", direct_cap: int = DIRECT_CAP_DEFAULT) -> np.ndarray:
    """PMF for every bin at once: P is (flights, bins), result (flights+1, bins).

    ``auto`` picks the direct convolution up to ``direct_cap`` flights and the
    characteristic-function path beyond.
    """
    F, B = P.shape
    if method == "auto":
        method = "direct" if F <= direct_cap else "fft"
    if method == "direct":
        pmf = np.zeros((F + 1, B))
        pmf[0] = 1.0
        for k in range(F):
            pf = P[k]
            head = pmf[: k + 2].copy()
            pmf[: k + 2] = head * (1.0 - pf)
            pmf[1 : k + 2] += head[: k + 1] * pf
        return pmf
    if method == "fft":
        w = 2.0 * np.pi / (F + 1)
        phases = np.exp(1j * w * np.arange(F + 1))
        x = np.ones((F + 1, B), dtype=complex)
        for k in range(F):
            x *= 1.0 - P[k][None, :] + P[k][None, :] * phases[:, None]
        pmf = (np.fft.fft(x, axis=0) / (F + 1)).real
        if pmf.min() < FFT_NEG_TOL:
            raise ModelInconsistencyError(f"FFT produced negative mass {pmf.min()}")
        pmf = np.maximum(pmf, 0.0)
        return pmf / pmf.sum(axis=0, keepdims=True)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class SectorField:
    sector_id: str
    flight_ids: Tuple[str, ...]
    presence: np.ndarray  # (flights, bins)
    pmf: np.ndarray  # (flights+1, bins)
    capacity: np.ndarray  # (bins,)

    @property
    def expected(self) -> np.ndarray:
        return self.presence.sum(axis=0) if len(self.flight_ids) else np.zeros(self.pmf.shape[1])

    def pmf_at(self, k: int) -> CongestionPmf:
        active = int((self.presence[:, k] > PRESENCE_EPS).sum())
        return CongestionPmf(self.sector_id, k, self.pmf[: active + 1, k].copy())


@dataclass(frozen=True)
class OccupancyField:
    grid: TimeGrid
    sectors: Dict[str, SectorField]

    def presence_curves(self) -> List[PresenceCurve]:
        out = []
        for sf in self.sectors.values():
            for fid, row in zip(sf.flight_ids, sf.presence):
                out.append(PresenceCurve(sf.sector_id, fid, row))
        return out


def occupancy_field(
    marginals: Dict[str, List[DiscretePdf]],
    plans: Sequence[FlightPlan],
    sectors: Sequence[Sector],
    grid: TimeGrid,
    method: str = "auto",
    direct_cap: int = DIRECT_CAP_DEFAULT,
) -> OccupancyField:
    """Assemble presence curves and congestion PMFs for every sector."""
    plan_by_id = {p.id: p for p in plans}
    rows: Dict[str, List[Tuple[str, np.ndarray]]] = {s.id: [] for s in sectors}
    for fid, margs in marginals.items():
        plan = plan_by_id[fid]
        for sector_id, i_entry, i_exit in plan.sector_chain():
            if sector_id not in rows:
                raise ValueError(f"flight {fid} references unknown sector {sector_id}")
            rows[sector_id].append(
                (fid, presence_curve_array(margs[i_entry], margs[i_exit], grid))
            )
    fields = {}
    for sector in sectors:
        entries = rows[sector.id]
        flight_ids = tuple(fid for fid, _ in entries)
        P = np.vstack([r for _, r in entries]) if entries else np.zeros((0, grid.horizon))
        pmf = congestion_pmf_matrix(P, method=method, direct_cap=direct_cap)
        fields[sector.id] = SectorField(
            sector.id, flight_ids, P, pmf, sector.capacity_profile(grid)
        )
    return OccupancyField(grid, fields)


@dataclass(frozen=True)
class Alarm:
    sector_id: str
    start_bin: int
    end_bin: int  # inclusive
    peak_expected: float
    capacity: float


def monitor_alarms(fld: OccupancyField, threshold_ratio: float = 0.9) -> List[Alarm]:
    """One alarm per maximal run of bins with E[K] >= ratio * capacity."""
    alarms = []
    for sf in fld.sectors.values():
        hot = sf.expected >= threshold_ratio * sf.capacity
        k = 0
        B = len(hot)
        while k < B:
            if hot[k]:
                start = k
                while k + 1 < B and hot[k + 1]:
                    k += 1
                peak = int(np.argmax(sf.expected[start : k + 1])) + start
                alarms.append(
                    Alarm(sf.sector_id, start, k, float(sf.expected[peak]), float(sf.capacity[peak]))
                )
            k += 1
    return alarms
