"""Discrete-time probability kernels.

Everything downstream works on a uniform minute grid: bin ``k`` of a
:class:`TimeGrid` covers the half-open interval
``[origin + k*step, origin + (k+1)*step)``.  Probability mass vectors are
bounded-support and must sum to one within ``NORM_TOL``; a violation is a
hard error, never a silent renormalize.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpecError, HorizonOverflowError, NormalizationError

NORM_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform discretization of the planning horizon, in integer minutes."""

    origin: int
    horizon: int
    step: int = 1

    def __post_init__(self):
        if self.step <= 0 or self.horizon <= 0:
            raise ValueError("step and horizon must be positive")

    @property
    def end(self) -> int:
        return self.origin + self.horizon * self.step

    def lower_edge(self, k):
        return self.origin + np.asarray(k) * self.step

    def upper_edge(self, k):
        return self.origin + (np.asarray(k) + 1) * self.step

    def midpoint(self, k):
        return self.origin + (np.asarray(k) + 0.5) * self.step

    def midpoints(self) -> np.ndarray:
        return self.origin + (np.arange(self.horizon) + 0.5) * self.step

    def bin_of(self, t) -> np.ndarray:
        """Bin index containing time t (no bounds check)."""
        return np.floor((np.asarray(t) - self.origin) / self.step).astype(int)

    def contains_time(self, t) -> bool:
        return bool(np.all((np.asarray(t) >= self.origin) & (np.asarray(t) <= self.end)))


@dataclass(frozen=True)
class DiscretePdf:
    """Probability mass over a contiguous bin window of a grid.

    ``mass[j]`` is the probability of bin ``support_lo + j``; mass is zero
    outside ``[support_lo, support_hi]``.
    """

    grid: TimeGrid
    support_lo: int
    support_hi: int
    mass: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 1 or len(mass) != self.support_hi - self.support_lo + 1:
            raise ValueError("mass length does not match the support window")
        if self.support_lo < 0 or self.support_hi >= self.grid.horizon:
            raise HorizonOverflowError(
                f"support [{self.support_lo}, {self.support_hi}] outside grid "
                f"of {self.grid.horizon} bins"
            )
        if np.any(mass < -1e-12):
            raise NormalizationError("negative probability mass")
        mass = np.maximum(mass, 0.0)
        total = float(mass.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise NormalizationError(f"mass sums to {total}, not 1")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "_cum", np.cumsum(mass))

    @classmethod
    def point_mass(cls, grid: TimeGrid, t: float) -> "DiscretePdf":
        k = int(grid.bin_of(t))
        return cls(grid, k, k, np.ones(1))

    def cdf(self, k) -> np.ndarray:
        """Total mass over bins <= k; clamps to 0/1 outside the support."""
        idx = np.clip(np.asarray(k) - self.support_lo, -1, len(self.mass) - 1)
        padded = np.concatenate(([0.0], self._cum))
        return padded[idx + 1]

    def prob_of_bin(self, k) -> np.ndarray:
        k = np.asarray(k)
        inside = (k >= self.support_lo) & (k <= self.support_hi)
        j = np.clip(k - self.support_lo, 0, len(self.mass) - 1)
        return np.where(inside, self.mass[j], 0.0)

    def dense(self) -> np.ndarray:
        """Mass expanded over the full grid."""
        out = np.zeros(self.grid.horizon)
        out[self.support_lo : self.support_hi + 1] = self.mass
        return out

    def mean_time(self) -> float:
        mids = self.grid.midpoint(np.arange(self.support_lo, self.support_hi + 1))
        return float(np.dot(mids, self.mass))

    def support_width(self) -> int:
        return self.support_hi - self.support_lo + 1

    def trimmed(self, eps: float = 0.0) -> "DiscretePdf":
        """Shrink the window to the bins actually carrying mass > eps."""
        nz = np.nonzero(self.mass > eps)[0]
        if len(nz) == 0:
            return self
        lo, hi = int(nz[0]), int(nz[-1])
        return DiscretePdf(
            self.grid, self.support_lo + lo, self.support_lo + hi, self.mass[lo : hi + 1]
        )


@dataclass(frozen=True)
class TriangularSpec:
    """Triangular density parameters, in minutes."""

    lo: float
    mode: float
    hi: float

    def __post_init__(self):
        if self.hi <= self.lo:
            raise DegenerateSpecError(f"triangular support [{self.lo}, {self.hi}] is empty")
        if not (self.lo <= self.mode <= self.hi):
            raise DegenerateSpecError(
                f"mode {self.mode} outside support [{self.lo}, {self.hi}]"
            )


def triangular_cdf(x, lo, mode, hi):
    """CDF of the triangular distribution, vectorized with broadcasting.

    Degenerate widths (hi == lo) collapse to a step function so callers can
    feed point-mass limits without special-casing.
    """
    x = np.asarray(x, float)
    lo = np.asarray(lo, float)
    mode = np.asarray(mode, float)
    hi = np.asarray(hi, float)
    width = hi - lo
    dl = mode - lo
    dr = hi - mode
    tiny = 1e-300  # keeps 0/0 corners at exactly 0 without branching
    a = np.clip(x, lo, mode)
    b = np.clip(x, mode, hi)
    left = (a - lo) ** 2 / np.maximum(dl, tiny)
    right = dr - (hi - b) ** 2 / np.maximum(dr, tiny)
    out = (left + right) / np.maximum(width, tiny)
    if np.any(width <= 0):
        out = np.where(width <= 0, (x > lo).astype(float), out)
    return out


def discretize_triangular(spec: TriangularSpec, grid: TimeGrid) -> DiscretePdf:
    """Bin-integrated triangular density: exact CDF differences per bin.

    The exact integral of the piecewise-linear density over each bin avoids
    the renormalization bias that midpoint sampling shows at the mode and
    boundary bins.
    """
    if spec.lo < grid.origin or spec.hi > grid.end:
        raise HorizonOverflowError(
            f"triangular support [{spec.lo}, {spec.hi}] outside horizon "
            f"[{grid.origin}, {grid.end}]"
        )
    lo_bin = int(grid.bin_of(spec.lo))
    hi_bin = min(int(grid.bin_of(spec.hi)), grid.horizon - 1)
    edges = grid.lower_edge(np.arange(lo_bin, hi_bin + 2)).astype(float)
    cdf_vals = triangular_cdf(edges, spec.lo, spec.mode, spec.hi)
    mass = np.diff(cdf_vals)
    return DiscretePdf(grid, lo_bin, hi_bin, mass).trimmed()


def cdf(pdf: DiscretePdf, k) -> float:
    """Mass over bins <= k (free-function form of DiscretePdf.cdf)."""
    return float(pdf.cdf(k))


def expectation_of(pdf: DiscretePdf, penalty) -> float:
    """Expected per-bin cost, evaluating the penalty at bin midpoints.

    ``penalty`` must accept a numpy array of midpoint times.
    """
    mids = pdf.grid.midpoint(np.arange(pdf.support_lo, pdf.support_hi + 1))
    values = np.asarray(penalty(mids), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("penalty is not finite on the support")
    return float(np.dot(values, pdf.mass))
