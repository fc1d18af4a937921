"""Grid, sampled functions, specs, exact integration, and partitions."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onesided.grid import (
    CellSet,
    ConstSpec,
    CsvSpec,
    Grid,
    IndicatorSpec,
    IntervalSpec,
    PowerSpec,
    RandomSpec,
    SampledFunction,
    StepsSpec,
    components_of_mask,
    geometric_partition,
    integrate,
    level_components,
    parse_function_spec,
    prefix_cell_sums,
    sample_function,
)

# ---------------------------------------------------------------------------
# Grid basics


def test_grid_geometry():
    g = Grid(-1.0, 0.25, 8)
    assert g.right == 1.0
    assert g.extent == 2.0
    assert g.boundary(0) == -1.0
    assert g.boundary(8) == 1.0
    np.testing.assert_allclose(g.left_boundaries(), -1.0 + 0.25 * np.arange(8))
    np.testing.assert_allclose(g.right_boundaries(), -0.75 + 0.25 * np.arange(8))


@pytest.mark.parametrize(
    "origin,spacing,count",
    [(0.0, 0.0, 4), (0.0, -1.0, 4), (0.0, 1.0, 0), (math.inf, 1.0, 4), (0.0, math.nan, 4)],
)
def test_grid_validation(origin, spacing, count):
    with pytest.raises(ValueError):
        Grid(origin, spacing, count)


def test_boundary_index_strict():
    g = Grid(0.0, 0.125, 16)
    assert g.boundary_index(0.5) == 4
    assert g.boundary_index(0.5 + 1e-12) == 4  # within tolerance
    with pytest.raises(ValueError, match="not on a cell boundary"):
        g.boundary_index(0.51)
    with pytest.raises(ValueError, match="outside the grid"):
        g.boundary_index(3.0)


def test_nearest_boundary_index_clips_and_rounds():
    g = Grid(0.0, 0.25, 8)
    assert g.nearest_boundary_index(0.3) == 1
    assert g.nearest_boundary_index(0.375) == 2  # tie rounds up
    assert g.nearest_boundary_index(-5.0) == 0
    assert g.nearest_boundary_index(99.0) == 8


def test_refined_keeps_extent():
    g = Grid(-1.0, 0.5, 6)
    f = g.refined(4)
    assert f.count == 24
    assert f.spacing == 0.125
    assert f.right == g.right
    with pytest.raises(ValueError):
        g.refined(0)


# ---------------------------------------------------------------------------
# SampledFunction


def test_sampled_function_validation(unit_grid):
    with pytest.raises(ValueError, match="shape"):
        SampledFunction(unit_grid, np.zeros(unit_grid.count + 1))
    with pytest.raises(ValueError, match="finite"):
        SampledFunction(unit_grid, np.full(unit_grid.count, np.nan))
    with pytest.raises(ValueError, match="finite"):
        values = np.zeros(unit_grid.count)
        values[3] = np.inf
        SampledFunction(unit_grid, values)


def test_sampled_function_immutable(unit_grid):
    f = unit_grid.constant(1.0)
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_sampled_function_arithmetic(unit_grid, rng):
    a = SampledFunction(unit_grid, rng.normal(size=unit_grid.count))
    b = SampledFunction(unit_grid, rng.normal(size=unit_grid.count))
    np.testing.assert_array_equal((a + b).values, a.values + b.values)
    np.testing.assert_array_equal((a - b).values, a.values - b.values)
    np.testing.assert_array_equal((2.5 * a).values, 2.5 * a.values)
    np.testing.assert_array_equal(abs(a).values, np.abs(a.values))
    other = Grid(0.0, 1.0, unit_grid.count)
    with pytest.raises(ValueError, match="different grids"):
        a + SampledFunction(other, np.zeros(other.count))


def test_resampled_identity_and_refinement(unit_grid, rng):
    f = SampledFunction(unit_grid, rng.normal(size=unit_grid.count))
    same = f.resampled(unit_grid)
    np.testing.assert_allclose(same.values, f.values, rtol=0, atol=1e-12)
    fine = f.resampled(unit_grid.refined(3))
    # refinement of a piecewise-constant function repeats each cell value
    np.testing.assert_allclose(fine.values, np.repeat(f.values, 3), rtol=1e-12, atol=1e-12)
    # total integral is preserved
    assert integrate(fine, unit_grid.origin, unit_grid.right) == pytest.approx(
        integrate(f, unit_grid.origin, unit_grid.right), rel=1e-12
    )


# ---------------------------------------------------------------------------
# CellSet / IntervalSpec


def test_cellset_measure_and_components():
    g = Grid(0.0, 0.25, 12)
    mask = np.zeros(12, dtype=bool)
    mask[[1, 2, 5, 6, 7, 11]] = True
    s = CellSet(g, mask)
    assert s.cell_count == 6
    assert s.measure == 6 * 0.25
    comps = s.components()
    assert [(c.a, c.c) for c in comps] == [(0.25, 0.75), (1.25, 2.0), (2.75, 3.0)]


def test_cellset_from_interval_strict():
    g = Grid(0.0, 0.25, 12)
    s = CellSet.from_interval(g, 0.5, 1.25)
    assert s.cell_count == 3
    with pytest.raises(ValueError, match="not on a cell boundary"):
        CellSet.from_interval(g, 0.1, 1.0)
    with pytest.raises(ValueError, match="empty"):
        CellSet.from_interval(g, 1.0, 1.0)


def test_interval_spec_snapped():
    g = Grid(0.0, 0.25, 12)
    spec = IntervalSpec.snapped(g, 0.26, 1.1)
    assert (spec.a, spec.c) == (0.25, 1.0)
    with pytest.raises(ValueError, match="collapses"):
        IntervalSpec.snapped(g, 0.3, 0.31)
    with pytest.raises(ValueError):
        IntervalSpec(1.0, 1.0)


# ---------------------------------------------------------------------------
# Function specs: grammar


@pytest.mark.parametrize(
    "text,expected",
    [
        ("indicator:0:1", IndicatorSpec(0.0, 1.0)),
        ("power:0.5", PowerSpec(0.5)),
        ("const:-2.5", ConstSpec(-2.5)),
        ("steps:0:1:2:1:2:-0.5", StepsSpec(((0.0, 1.0, 2.0), (1.0, 2.0, -0.5)))),
        ("random:7", RandomSpec(7)),
        ("random:7:-1:1", RandomSpec(7, -1.0, 1.0)),
        ("csv:/tmp/x.csv", CsvSpec("/tmp/x.csv")),
    ],
)
def test_parse_function_spec(text, expected):
    assert parse_function_spec(text) == expected


@pytest.mark.parametrize(
    "text",
    [
        "indicator:0",
        "power:abc",
        "steps:0:1",
        "random:7:0",
        "csv:",
        "gauss:1",
        "",
    ],
)
def test_parse_function_spec_rejects(text):
    with pytest.raises(ValueError):
        parse_function_spec(text)


# ---------------------------------------------------------------------------
# Function specs: sampling exactness


def test_indicator_sampling_exact():
    g = Grid(-1.0, 0.125, 24)
    f = sample_function(IndicatorSpec(0.0, 1.0), g)
    expected = np.zeros(24)
    expected[8:16] = 1.0
    np.testing.assert_array_equal(f.values, expected)
    with pytest.raises(ValueError, match="not on a cell boundary"):
        sample_function(IndicatorSpec(0.0, 0.9999), g)
    with pytest.raises(ValueError):
        sample_function(IndicatorSpec(1.0, 0.0), g)


def test_steps_sampling_additive():
    g = Grid(0.0, 0.5, 8)
    f = sample_function(StepsSpec(((0.0, 2.0, 1.0), (1.0, 3.0, 0.5))), g)
    np.testing.assert_array_equal(f.values, [1.0, 1.0, 1.5, 1.5, 0.5, 0.5, 0.0, 0.0])


def test_const_sampling():
    g = Grid(0.0, 0.5, 4)
    np.testing.assert_array_equal(sample_function(ConstSpec(3.5), g).values, np.full(4, 3.5))


def test_power_sampling_matches_quadrature():
    """Cell means of |x|**gamma agree with adaptive quadrature, including the
    cell that carries the integrable singularity at 0."""
    from scipy.integrate import quad

    g = Grid(-1.5, 0.25, 16)
    for gamma in (0.5, 1.0, 2.0, -0.5):
        f = sample_function(PowerSpec(gamma), g)
        for i in (0, 3, 5, 6, 7, 11, 15):
            a, b = g.boundary(i), g.boundary(i + 1)
            pts = [0.0] if a < 0.0 < b else None
            val, _ = quad(lambda x: abs(x) ** gamma, a, b, points=pts, limit=200)
            assert f.values[i] == pytest.approx(val / g.spacing, rel=1e-8), (gamma, i)


def test_power_sampling_integer_case_exact():
    # gamma = 1: cell mean of |x| on a cell not containing 0 is the midpoint
    g = Grid(1.0, 0.5, 4)
    f = sample_function(PowerSpec(1.0), g)
    np.testing.assert_allclose(f.values, [1.25, 1.75, 2.25, 2.75], rtol=1e-14)


def test_power_sampling_rejects_gamma():
    g = Grid(0.0, 0.5, 4)
    with pytest.raises(ValueError, match="exceed -1"):
        sample_function(PowerSpec(-1.0), g)


def test_random_sampling_deterministic():
    g = Grid(0.0, 0.5, 32)
    a = sample_function(RandomSpec(5, -1.0, 1.0), g)
    b = sample_function(RandomSpec(5, -1.0, 1.0), g)
    c = sample_function(RandomSpec(6, -1.0, 1.0), g)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert np.all(a.values >= -1.0) and np.all(a.values <= 1.0)
    with pytest.raises(ValueError, match="low < high"):
        sample_function(RandomSpec(5, 1.0, 1.0), g)


def test_csv_sampling_roundtrip(tmp_path):
    g = Grid(0.0, 0.25, 8)
    path = tmp_path / "f.csv"
    path.write_text("x,value\n0.5,1.5\n0.75,2.5\n1.0,-3.0\n")
    f = sample_function(CsvSpec(str(path)), g)
    np.testing.assert_array_equal(f.values, [0, 0, 1.5, 2.5, -3.0, 0, 0, 0])


def test_csv_sampling_rejects_bad_spacing(tmp_path):
    g = Grid(0.0, 0.25, 8)
    path = tmp_path / "f.csv"
    path.write_text("0.0,1.0\n0.1,2.0\n")
    with pytest.raises(ValueError, match="advance by the grid spacing"):
        sample_function(CsvSpec(str(path)), g)


def test_csv_sampling_rejects_overrun(tmp_path):
    g = Grid(0.0, 0.25, 4)
    path = tmp_path / "f.csv"
    rows = "\n".join(f"{0.25 * i},{i}" for i in range(6))
    path.write_text(rows + "\n")
    with pytest.raises(ValueError, match="past the right edge"):
        sample_function(CsvSpec(str(path)), g)


def test_csv_sampling_rejects_empty(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("x,value\n")
    with pytest.raises(ValueError, match="no data rows"):
        sample_function(CsvSpec(str(path)), Grid(0.0, 0.25, 4))


# ---------------------------------------------------------------------------
# Exact integration


def test_integrate_against_overlap_oracle(medium_grid, rng):
    f = SampledFunction(medium_grid, rng.normal(size=medium_grid.count))
    left = medium_grid.left_boundaries()
    right = left + medium_grid.spacing
    for _ in range(50):
        a, c = sorted(rng.uniform(medium_grid.origin - 1.0, medium_grid.right + 1.0, 2))
        overlap = np.clip(np.minimum(right, c) - np.maximum(left, a), 0.0, None)
        oracle = float((overlap * f.values).sum())
        assert integrate(f, a, c) == pytest.approx(oracle, rel=1e-10, abs=1e-12)


def test_integrate_outside_grid_is_zero(unit_grid, rng):
    f = SampledFunction(unit_grid, rng.normal(size=unit_grid.count))
    assert integrate(f, unit_grid.right, unit_grid.right + 5.0) == 0.0
    assert integrate(f, unit_grid.origin - 5.0, unit_grid.origin) == 0.0
    with pytest.raises(ValueError):
        integrate(f, 1.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(
    data=st.lists(st.floats(-10, 10), min_size=4, max_size=32),
    pts=st.lists(st.floats(-3, 3), min_size=3, max_size=3),
)
def test_integrate_splitting_identity(data, pts):
    """integrate(a,m) + integrate(m,c) == integrate(a,c) up to final-addition
    rounding (all three terms are differences of one cumulative function, so
    no quadrature error enters — only ulp-level float cancellation)."""
    g = Grid(-2.0, 4.0 / len(data), len(data))
    f = SampledFunction(g, np.array(data))
    a, m, c = sorted(pts)
    split = integrate(f, a, m) + integrate(f, m, c)
    whole = integrate(f, a, c)
    scale = max(abs(integrate(f, a, m)), abs(integrate(f, m, c)), abs(whole), 1.0)
    assert abs(split - whole) <= 4e-16 * scale


def test_prefix_cell_sums(unit_grid, rng):
    f = SampledFunction(unit_grid, rng.normal(size=unit_grid.count))
    P = prefix_cell_sums(f)
    assert P[0] == 0.0
    np.testing.assert_array_equal(P[1:], np.cumsum(f.values))


# ---------------------------------------------------------------------------
# Level sets and partitions


def test_level_components():
    g = Grid(0.0, 1.0, 6)
    f = SampledFunction(g, np.array([0.0, 2.0, 2.0, 0.5, 3.0, 0.0]))
    comps = level_components(f, 1.0)
    assert [(c.a, c.c) for c in comps] == [(1.0, 3.0), (4.0, 5.0)]
    assert level_components(f, 10.0) == []


@settings(max_examples=100, deadline=None)
@given(bits=st.lists(st.booleans(), min_size=1, max_size=40))
def test_components_of_mask_matches_scan(bits):
    g = Grid(0.0, 1.0, len(bits))
    mask = np.array(bits)
    comps = components_of_mask(g, mask)
    # independent run-length scan
    runs = []
    start = None
    for i, b in enumerate(bits + [False]):
        if b and start is None:
            start = i
        elif not b and start is not None:
            runs.append((float(start), float(i)))
            start = None
    assert [(c.a, c.c) for c in comps] == runs
    # and the components tile the mask exactly
    rebuilt = np.zeros(len(bits), dtype=bool)
    for c in comps:
        rebuilt[int(c.a) : int(c.c)] = True
    np.testing.assert_array_equal(rebuilt, mask)


def test_geometric_partition_halving():
    g = Grid(0.0, 1.0, 64)
    pts = geometric_partition(0.0, 64.0, g)
    assert pts == [0.0, 32.0, 48.0, 56.0, 60.0, 62.0, 63.0]
    # strictly increasing, gaps halve (up to one-cell rounding), ends one short
    gaps = np.diff(pts)
    assert np.all(gaps > 0)
    assert pts[-1] == 63.0


def test_geometric_partition_small_gap():
    g = Grid(0.0, 1.0, 8)
    assert geometric_partition(3.0, 3.5, g) == [3.0]
    with pytest.raises(ValueError):
        geometric_partition(5.0, 5.0, g)


@settings(max_examples=100, deadline=None)
@given(ia=st.integers(0, 50), gap=st.integers(1, 50))
def test_geometric_partition_structure(ia, gap):
    g = Grid(0.0, 0.25, 128)
    a = g.boundary(ia)
    b = g.boundary(min(ia + gap, 128))
    if b <= a:
        return
    pts = geometric_partition(a, b, g)
    assert pts[0] == a
    assert all(x < y for x, y in zip(pts, pts[1:]))
    # the march ends exactly one cell short of b
    assert pts[-1] == pytest.approx(b - g.spacing)
    # every point is a boundary
    for x in pts:
        g.boundary_index(x)
