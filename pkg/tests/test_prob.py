import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcap.errors import DegenerateSpecError, HorizonOverflowError, NormalizationError
from flowcap.prob import (
    DiscretePdf,
    TimeGrid,
    TriangularSpec,
    discretize_triangular,
    expectation_of,
    triangular_cdf,
)

GRID = TimeGrid(origin=0, horizon=120, step=1)


def test_grid_bin_edges():
    g = TimeGrid(origin=10, horizon=5, step=2)
    assert g.lower_edge(0) == 10
    assert g.upper_edge(0) == 12
    assert g.midpoint(3) == 17.0
    assert g.bin_of(13.9) == 1
    assert g.end == 20


def test_grid_rejects_bad_shape():
    with pytest.raises(ValueError):
        TimeGrid(0, 0)
    with pytest.raises(ValueError):
        TimeGrid(0, 10, step=-1)


def test_symmetric_triangle_cdf_half_at_mode():
    pdf = discretize_triangular(TriangularSpec(0, 5, 10), GRID)
    # bins 0..4 cover [0, 5), exactly the left half of the symmetric triangle
    assert pdf.cdf(4) == pytest.approx(0.5, abs=1e-12)
    assert pdf.mass.sum() == pytest.approx(1.0, abs=1e-9)


def test_right_triangle_mass_decreasing():
    pdf = discretize_triangular(TriangularSpec(0, 0, 10), GRID)
    assert np.all(np.diff(pdf.mass) < 0)
    assert pdf.mass[0] == pdf.mass.max()


def test_discretization_matches_quadrature_oracle():
    # fine-grained Riemann quadrature of the triangular density, 1e-4 steps
    lo, mode, hi = 0.0, 7.0, 24.0
    pdf = discretize_triangular(TriangularSpec(lo, mode, hi), GRID)
    xs = np.arange(lo, hi, 1e-4) + 0.5e-4
    dens = np.where(
        xs < mode,
        2 * (xs - lo) / ((hi - lo) * (mode - lo)),
        2 * (hi - xs) / ((hi - lo) * (hi - mode)),
    )
    oracle = np.array(
        [dens[(xs >= k) & (xs < k + 1)].sum() * 1e-4 for k in range(int(lo), int(hi))]
    )
    mine = pdf.dense()[int(lo) : int(hi)]
    assert np.abs(mine - oracle).max() < 1e-6


def test_cdf_clamps_outside_support():
    pdf = DiscretePdf(GRID, 10, 13, np.full(4, 0.25))
    assert pdf.cdf(9) == 0.0
    assert pdf.cdf(50) == 1.0
    assert pdf.cdf(11) == pytest.approx(0.5)


def test_point_mass():
    pdf = DiscretePdf.point_mass(GRID, 42.7)
    assert pdf.support_lo == pdf.support_hi == 42
    assert pdf.mean_time() == 42.5


def test_expectation_point_mass_identity():
    pdf = DiscretePdf.point_mass(GRID, 17.0)
    assert expectation_of(pdf, lambda t: t) == 17.5  # bin midpoint convention


def test_expectation_zero_penalty():
    pdf = discretize_triangular(TriangularSpec(0, 5, 10), GRID)
    assert expectation_of(pdf, lambda t: np.zeros_like(t)) == 0.0


def test_expectation_hand_value():
    pdf = DiscretePdf(GRID, 0, 2, np.array([0.25, 0.5, 0.25]))
    # penalty k^2 at bin indices: midpoints are k + 0.5, so pass floor(t)
    val = expectation_of(pdf, lambda t: np.floor(t) ** 2)
    assert val == pytest.approx(0.5 * 1 + 0.25 * 4)


def test_degenerate_spec_rejected():
    with pytest.raises(DegenerateSpecError):
        TriangularSpec(5, 5, 5)
    with pytest.raises(DegenerateSpecError):
        TriangularSpec(0, 11, 10)


def test_spec_outside_horizon_rejected():
    with pytest.raises(HorizonOverflowError):
        discretize_triangular(TriangularSpec(100, 110, 130), GRID)


def test_unnormalized_mass_is_hard_error():
    with pytest.raises(NormalizationError):
        DiscretePdf(GRID, 0, 1, np.array([0.5, 0.4]))
    with pytest.raises(NormalizationError):
        DiscretePdf(GRID, 0, 1, np.array([1.5, -0.5]))


def test_triangular_cdf_degenerate_width_is_step():
    assert triangular_cdf(4.0, 5.0, 5.0, 5.0) == 0.0
    assert triangular_cdf(6.0, 5.0, 5.0, 5.0) == 1.0


@st.composite
def triangular_specs(draw):
    lo = draw(st.floats(0, 80))
    width = draw(st.floats(0.5, 30))
    frac = draw(st.floats(0, 1))
    return TriangularSpec(lo, lo + frac * width, lo + width)


@given(triangular_specs(), st.integers(0, 119), st.integers(0, 119))
@settings(max_examples=200, deadline=None)
def test_cdf_monotone(spec, a, b):
    pdf = discretize_triangular(spec, GRID)
    lo, hi = min(a, b), max(a, b)
    assert pdf.cdf(lo) <= pdf.cdf(hi) + 1e-12


@given(triangular_specs())
@settings(max_examples=100, deadline=None)
def test_discretization_normalized(spec):
    pdf = discretize_triangular(spec, GRID)
    assert abs(pdf.mass.sum() - 1.0) <= 1e-9


def test_refinement_roughly_halves_cdf_deviation():
    # The discrete CDF is exact at bin edges, so the worst interior deviation
    # is bounded by the largest bin mass, which is first order in the step.
    rng = np.random.Generator(np.random.PCG64(7))
    for _ in range(10):
        lo = float(rng.uniform(0, 40))
        spec = TriangularSpec(lo, lo + float(rng.uniform(0.2, 10)), lo + float(rng.uniform(12, 25)))
        ts = rng.uniform(spec.lo, spec.hi, size=400)
        exact = triangular_cdf(ts, spec.lo, spec.mode, spec.hi)
        devs = {}
        for step in (2, 1):
            g = TimeGrid(0, 140 // step, step)
            pdf = discretize_triangular(spec, g)
            devs[step] = np.abs(pdf.cdf(g.bin_of(ts)) - exact).max()
        ratio = devs[1] / devs[2]
        assert 0.25 < ratio < 0.85
