"""One-sided maximal, sharp maximal, and oscillation norms.

The brute-force window oracles live in conftest and share no code with the
prefix-sum or hull-sweep paths they check.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_forward_maximal, naive_sharp_maximal, random_function
from onesided.grid import Grid, IndicatorSpec, SampledFunction, sample_function
from onesided.maximal import (
    Direction,
    WindowPolicy,
    bmo_norm,
    bmo_plus_norm,
    dyadic_lengths,
    indicator_maximal_closed_form,
    one_sided_maximal,
    one_sided_maximal_fast,
    sharp_maximal,
)

# ---------------------------------------------------------------------------
# forward maximal against the brute-force oracle


def test_forward_maximal_matches_bruteforce(medium_grid, rng):
    for _ in range(5):
        f = random_function(medium_grid, rng)
        oracle = naive_forward_maximal(f.values)
        lib = one_sided_maximal(f).values
        np.testing.assert_allclose(lib, oracle, rtol=1e-12, atol=0)


def test_forward_maximal_zero_extension(unit_grid):
    # a lone unit cell at the right edge: window k anchored at distance d
    # reads the cell plus zeros, mean 1/k for k > d
    values = np.zeros(unit_grid.count)
    values[-1] = 1.0
    M = one_sided_maximal(SampledFunction(unit_grid, values)).values
    expected = 1.0 / (unit_grid.count - np.arange(unit_grid.count))
    np.testing.assert_allclose(M, expected, rtol=1e-14)


def test_forward_maximal_delta(medium_grid, rng):
    f = random_function(medium_grid, rng)
    for delta in (0.25, 0.5, 0.75):
        oracle = naive_forward_maximal(f.values, delta=delta)
        lib = one_sided_maximal(f, Direction.FORWARD, delta).values
        np.testing.assert_allclose(lib, oracle, rtol=1e-11, atol=0)


def test_delta_validation(unit_grid):
    f = unit_grid.constant(1.0)
    for delta in (0.0, -1.0, 1.5):
        with pytest.raises(ValueError, match="delta"):
            one_sided_maximal(f, Direction.FORWARD, delta)


def test_dyadic_policy_matches_restricted_oracle(medium_grid, rng):
    f = random_function(medium_grid, rng)
    lengths = dyadic_lengths(medium_grid.count)
    oracle = naive_forward_maximal(f.values, lengths=lengths)
    lib = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.DYADIC).values
    np.testing.assert_allclose(lib, oracle, rtol=1e-12, atol=0)


def test_dyadic_below_all(medium_grid, rng):
    f = random_function(medium_grid, rng)
    dy = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.DYADIC).values
    al = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.ALL).values
    assert np.all(dy <= al * (1 + 1e-12))


def test_dyadic_lengths():
    assert dyadic_lengths(1) == [1]
    assert dyadic_lengths(5) == [1, 2, 4, 8]
    assert dyadic_lengths(8) == [1, 2, 4, 8]
    assert dyadic_lengths(9)[-1] == 16


# ---------------------------------------------------------------------------
# backward direction


def test_backward_is_reversed_forward(medium_grid, rng):
    f = random_function(medium_grid, rng)
    back = one_sided_maximal(f, Direction.BACKWARD).values
    oracle = naive_forward_maximal(f.values[::-1])[::-1]
    np.testing.assert_allclose(back, oracle, rtol=1e-12, atol=0)


def test_backward_indicator_is_one_on_set():
    g = Grid(0.0, 0.125, 32)
    f = sample_function(IndicatorSpec(1.0, 2.0), g)
    back = one_sided_maximal(f, Direction.BACKWARD).values
    on = (g.left_boundaries() >= 1.0) & (g.left_boundaries() < 2.0)
    # anchored at the cell's right boundary, the best window for an E-cell
    # lies entirely inside E: the average is exactly count/count
    np.testing.assert_array_equal(back[on], 1.0)
    assert np.all(back[~on] < 1.0)


# ---------------------------------------------------------------------------
# fast hull sweep against the scan


def test_fast_matches_naive_random(medium_grid, rng):
    for _ in range(10):
        f = random_function(medium_grid, rng)
        naive = one_sided_maximal(f).values
        fast = one_sided_maximal_fast(f).values
        np.testing.assert_allclose(fast, naive, rtol=1e-12, atol=0)


def test_fast_matches_naive_structured(unit_grid):
    cases = [
        np.zeros(unit_grid.count),
        np.ones(unit_grid.count),
        np.arange(unit_grid.count, dtype=float),
        np.arange(unit_grid.count, dtype=float)[::-1].copy(),
        np.where(np.arange(unit_grid.count) % 2 == 0, 1.0, -1.0),
    ]
    spike = np.zeros(unit_grid.count)
    spike[unit_grid.count // 2] = 100.0
    cases.append(spike)
    for values in cases:
        f = SampledFunction(unit_grid, values)
        np.testing.assert_allclose(
            one_sided_maximal_fast(f).values,
            one_sided_maximal(f).values,
            rtol=1e-12,
            atol=0,
        )


def test_fast_backward(medium_grid, rng):
    f = random_function(medium_grid, rng)
    np.testing.assert_allclose(
        one_sided_maximal_fast(f, Direction.BACKWARD).values,
        one_sided_maximal(f, Direction.BACKWARD).values,
        rtol=1e-12,
        atol=0,
    )


@settings(max_examples=200, deadline=None)
@given(data=st.lists(st.floats(-100, 100), min_size=1, max_size=48))
def test_fast_matches_naive_property(data):
    g = Grid(0.0, 1.0, len(data))
    f = SampledFunction(g, np.array(data))
    naive = one_sided_maximal(f).values
    fast = one_sided_maximal_fast(f).values
    scale = max(float(naive.max(initial=0.0)), 1e-300)
    assert float(np.abs(fast - naive).max()) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(
    data=st.lists(st.floats(-50, 50), min_size=1, max_size=32),
    c=st.floats(0.01, 100),
)
def test_maximal_homogeneous_and_dominates(data, c):
    g = Grid(0.0, 0.5, len(data))
    f = SampledFunction(g, np.array(data))
    M = one_sided_maximal(f).values
    scale = float(np.abs(f.values).max(initial=0.0))
    # M(c*f) == c * M(f) up to prefix-sum rounding
    Mc = one_sided_maximal(f * c).values
    np.testing.assert_allclose(Mc, c * M, rtol=5e-13, atol=1e-13 * c * scale)
    # M >= |f| (the k=1 window); a tiny value can be absorbed into a large
    # prefix sum, so the slack is absolute at the cumsum scale
    assert np.all(M >= np.abs(f.values) - 1e-13 * len(data) * scale)


# ---------------------------------------------------------------------------
# indicator closed form


def test_indicator_closed_form_shape():
    x = np.array([-3.0, -1.0, 0.0, 0.5, 0.999, 1.0, 2.0])
    out = indicator_maximal_closed_form(0.0, 1.0, x)
    np.testing.assert_allclose(out, [0.25, 0.5, 1.0, 1.0, 1.0, 0.0, 0.0])
    assert indicator_maximal_closed_form(0.0, 1.0, -1.0) == 0.5
    assert isinstance(indicator_maximal_closed_form(0.0, 1.0, -1.0), float)
    with pytest.raises(ValueError):
        indicator_maximal_closed_form(1.0, 1.0, x)


def test_indicator_maximal_matches_closed_form():
    g = Grid(-2.0, 2.0**-7, 512)
    f = sample_function(IndicatorSpec(0.0, 1.0), g)
    disc = one_sided_maximal(f).values
    closed = indicator_maximal_closed_form(0.0, 1.0, g.left_boundaries())
    np.testing.assert_allclose(disc, closed, rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# sharp maximal


def test_sharp_matches_bruteforce(rng):
    g = Grid(0.0, 0.25, 48)
    for _ in range(5):
        f = random_function(g, rng)
        for policy in (WindowPolicy.ALL, WindowPolicy.DYADIC):
            if policy is WindowPolicy.ALL:
                lengths = list(range(1, g.count + 1))
            else:
                lengths = dyadic_lengths(g.count)
            oracle = naive_sharp_maximal(f.values, lengths)
            lib = sharp_maximal(f, 1.0, policy).values
            np.testing.assert_allclose(lib, oracle, rtol=1e-12, atol=1e-14)


def test_sharp_zero_on_monotone_dyadic_heights():
    """Nondecreasing staircases whose heights are coarse dyadic rationals
    make every prefix sum exact, so the one-sided oscillation cancels to
    exactly 0.0 on every cell."""
    g = Grid(0.0, 0.125, 96)
    rng = np.random.default_rng(11)
    cases = [
        np.zeros(g.count),
        np.full(g.count, 0.75),
        np.repeat(np.arange(12) * 0.25, 8),
        np.repeat(np.arange(24) / 64.0, 4),
        np.sort(rng.integers(0, 256, g.count)).astype(float) / 256.0,
    ]
    for values in cases:
        f = SampledFunction(g, values)
        for policy in (WindowPolicy.ALL, WindowPolicy.DYADIC):
            sharp = sharp_maximal(f, 1.0, policy).values
            assert float(np.abs(sharp).max()) == 0.0


def test_sharp_constant_shift_invariant():
    # dyadic data plus a dyadic constant: power-of-two window lengths divide
    # exactly, so the DYADIC policy is bit-for-bit shift invariant; other
    # window lengths pick up one division rounding per mean
    g = Grid(0.0, 0.25, 64)
    rng = np.random.default_rng(7)
    values = rng.integers(-64, 64, g.count).astype(float) / 16.0
    f, fs = SampledFunction(g, values), SampledFunction(g, values + 4.0)
    np.testing.assert_array_equal(
        sharp_maximal(f, 1.0, WindowPolicy.DYADIC).values,
        sharp_maximal(fs, 1.0, WindowPolicy.DYADIC).values,
    )
    np.testing.assert_allclose(
        sharp_maximal(f, 1.0, WindowPolicy.ALL).values,
        sharp_maximal(fs, 1.0, WindowPolicy.ALL).values,
        rtol=0,
        atol=1e-13,
    )


def test_sharp_inadmissible_tail_is_zero(unit_grid, rng):
    # the final cell has no admissible window pair (needs 2 cells)
    f = random_function(unit_grid, rng)
    sharp = sharp_maximal(f, 1.0, WindowPolicy.ALL).values
    assert sharp[-1] == 0.0


def test_sharp_dominated_by_three_maximal(medium_grid, rng):
    for _ in range(5):
        f = random_function(medium_grid, rng)
        sharp = sharp_maximal(f, 1.0, WindowPolicy.ALL).values
        M = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.ALL).values
        assert np.all(sharp <= 3.0 * M)


def test_sharp_delta(rng):
    g = Grid(0.0, 0.25, 40)
    f = random_function(g, rng)
    delta = 0.5
    oracle = naive_sharp_maximal(
        np.abs(f.values) ** delta, list(range(1, g.count + 1))
    ) ** (1.0 / delta)
    lib = sharp_maximal(f, delta, WindowPolicy.ALL).values
    np.testing.assert_allclose(lib, oracle, rtol=1e-11, atol=1e-14)


# ---------------------------------------------------------------------------
# oscillation norms


def test_bmo_plus_norm_is_sup_of_sharp(medium_grid, rng):
    f = random_function(medium_grid, rng)
    sharp = sharp_maximal(f, 1.0, WindowPolicy.ALL).values
    assert bmo_plus_norm(f) == float(sharp.max())


def test_bmo_norm_matches_bruteforce(rng):
    g = Grid(0.0, 0.5, 24)
    f = random_function(g, rng)
    v = f.values
    best = 0.0
    for i in range(g.count):
        for k in range(1, g.count - i + 1):
            w = v[i : i + k]
            best = max(best, float(np.abs(w - w.mean()).mean()))
    assert bmo_norm(f) == pytest.approx(best, rel=1e-12)


def test_bmo_norm_zero_on_constants(unit_grid):
    assert bmo_norm(unit_grid.constant(3.0)) == 0.0
