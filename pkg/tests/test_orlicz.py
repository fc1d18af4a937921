"""Young functions, Luxemburg averages, and Orlicz maximal operators.

The closed-form oracle throughout: for A(t) = t**p the Luxemburg average
over a set solves mean(A(|f|/lam)) = 1 in closed form, lam =
(mean |f|**p)**(1/p).  The library route is geometric bisection and never
sees this formula.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_function
from onesided.grid import CellSet, Grid, IntervalSpec, SampledFunction
from onesided.maximal import Direction, WindowPolicy, dyadic_lengths, one_sided_maximal
from onesided.orlicz import (
    ConjugatePair,
    conjugate_check,
    default_conjugate_pairs,
    exp_root,
    exp_root_log,
    fractional_orlicz_maximal,
    generalized_holder_check,
    log_log_power,
    luxemburg_from_samples,
    orlicz_average,
    orlicz_maximal,
    parse_young_spec,
    power,
    power_log,
    tabulated,
)

ALL_FAMILIES = [
    power(1.0),
    power(2.0),
    power(3.5),
    power_log(1.0, 1.0),
    power_log(2.0, 0.5),
    log_log_power(1.0, 0.5),
    exp_root(1.0),
    exp_root(2.0),
    exp_root_log(1.0, 0.5),
]


# ---------------------------------------------------------------------------
# Young function basics


def test_normalization_at_one():
    for A in ALL_FAMILIES:
        assert float(A.eval(1.0)) == 1.0, A.describe()


def test_eval_monotone_nonnegative():
    ts = np.geomspace(1e-6, 1e6, 200)
    for A in ALL_FAMILIES:
        vals = A.eval(ts)
        assert np.all(vals >= 0.0)
        assert np.all(np.diff(vals) >= -1e-12 * vals[1:]), A.describe()


def test_power_eval_closed_form():
    A = power(2.5)
    ts = np.geomspace(0.01, 100, 50)
    np.testing.assert_allclose(A.eval(ts), ts**2.5, rtol=1e-12)


def test_log_eval_matches_eval():
    ts = [0.01, 0.5, 1.0, 7.0, 1e4]
    for A in ALL_FAMILIES:
        for t in ts:
            v = float(A.eval(t))
            if v > 0 and math.isfinite(v):
                assert A.log_eval(t) == pytest.approx(math.log(v), abs=1e-9)


def test_log_eval_far_beyond_overflow():
    A = exp_root(1.0)
    # raw exp would overflow; log form stays finite and ~linear in t
    big = A.log_eval(1e6)
    assert math.isfinite(big)
    assert big == pytest.approx(1e6 - math.log(math.e - 1.0), rel=1e-9)


def test_inverse_round_trip():
    for A in ALL_FAMILIES:
        for s in np.geomspace(1e-3, 1e8, 12):
            u = A.inverse(float(s))
            assert A.log_eval(u) == pytest.approx(math.log(s), abs=1e-8), A.describe()


def test_inverse_validation():
    A = power(2.0)
    assert A.inverse(0.0) == 0.0
    with pytest.raises(ValueError):
        A.inverse(-1.0)
    with pytest.raises(ValueError):
        A.inverse(math.inf)


def test_family_parameter_validation():
    with pytest.raises(ValueError):
        power(0.5)
    with pytest.raises(ValueError):
        power_log(2.0, -1.0)
    with pytest.raises(ValueError):
        exp_root(0.5)
    with pytest.raises(ValueError):
        exp_root_log(-1.0, 0.0)


def test_tabulated_family(tmp_path):
    ts = np.geomspace(1e-4, 1e4, 96)
    table = tabulated(ts, ts**2)
    probe = np.geomspace(1e-3, 1e3, 40)
    np.testing.assert_allclose(table.eval(probe), probe**2, rtol=1e-6)
    with pytest.raises(ValueError, match="64"):
        tabulated([1.0, 2.0], [1.0, 4.0])
    with pytest.raises(ValueError, match="increasing"):
        tabulated(list(ts[::-1]), list(ts**2))


def test_parse_young_spec(tmp_path):
    assert parse_young_spec("power:2") == power(2.0)
    assert parse_young_spec("powerlog:1:1") == power_log(1.0, 1.0)
    assert parse_young_spec("loglog:1:0.5") == log_log_power(1.0, 0.5)
    assert parse_young_spec("exproot:2") == exp_root(2.0)
    assert parse_young_spec("exprootlog:1:0.5") == exp_root_log(1.0, 0.5)
    path = tmp_path / "table.csv"
    ts = np.geomspace(0.01, 100, 80)
    path.write_text("t,A\n" + "\n".join(f"{t},{t * t}" for t in ts) + "\n")
    table = parse_young_spec(f"table:{path}")
    assert table.family == "table"
    for bad in ("power:0.5", "powerlog:1", "unknown:1", "table:", ""):
        with pytest.raises(ValueError):
            parse_young_spec(bad)


# ---------------------------------------------------------------------------
# Luxemburg averages


def test_luxemburg_power_closed_form(rng):
    for p in (1.5, 2.0, 3.0):
        A = power(p)
        vals = rng.uniform(0.0, 5.0, 64)
        w = np.full(64, 0.25)
        measure = float(w.sum())
        lam = luxemburg_from_samples(vals, w, measure, A)
        oracle = float(((vals**p * w).sum() / measure) ** (1.0 / p))
        assert lam == pytest.approx(oracle, rel=1e-9)


def test_luxemburg_partial_fill(rng):
    # pieces fill only part of the set; the gap contributes A(0) = 0
    A = power(2.0)
    vals = np.array([3.0, 1.0])
    w = np.array([0.5, 0.25])
    measure = 2.0
    lam = luxemburg_from_samples(vals, w, measure, A)
    oracle = math.sqrt((9.0 * 0.5 + 1.0 * 0.25) / 2.0)
    assert lam == pytest.approx(oracle, rel=1e-9)


def test_luxemburg_zero_mass():
    assert luxemburg_from_samples(np.zeros(8), np.ones(8), 8.0, power(2.0)) == 0.0


def test_luxemburg_validation():
    with pytest.raises(ValueError, match="measure"):
        luxemburg_from_samples(np.ones(4), np.ones(4), 0.0, power(2.0))


@settings(max_examples=50, deadline=None)
@given(
    data=st.lists(st.floats(0, 50), min_size=2, max_size=24),
    c=st.floats(0.01, 100),
)
def test_luxemburg_homogeneous(data, c):
    A = power_log(1.0, 1.0)
    vals = np.array(data)
    w = np.ones(len(vals))
    base = luxemburg_from_samples(vals, w, float(len(vals)), A)
    scaled = luxemburg_from_samples(c * vals, w, float(len(vals)), A)
    assert scaled == pytest.approx(c * base, rel=1e-8, abs=1e-300)


def test_luxemburg_monotone_in_young(rng):
    # pointwise larger A forces a larger lam to bring the mean back to 1
    vals = rng.uniform(0.5, 4.0, 32)
    w = np.ones(32)
    lam_small = luxemburg_from_samples(vals, w, 32.0, power(2.0))
    lam_big = luxemburg_from_samples(vals, w, 32.0, power(4.0))
    # A4 >= A2 above t=1 where it matters here (all entries >= 0.5 scale)
    assert lam_big >= lam_small * (1 - 1e-9)


def test_orlicz_average_power_shortcut(medium_grid, rng):
    f = random_function(medium_grid, rng)
    E = CellSet.from_interval(medium_grid, -1.0, 1.0)
    assert orlicz_average(f, E, power(1.0)) == float(np.abs(f.values[E.mask]).mean())


def test_orlicz_average_interval_vs_cellset(medium_grid, rng):
    f = random_function(medium_grid, rng)
    A = power(2.0)
    via_interval = orlicz_average(f, IntervalSpec(-1.0, 0.5), A)
    via_set = orlicz_average(f, CellSet.from_interval(medium_grid, -1.0, 0.5), A)
    assert via_interval == via_set


def test_orlicz_average_closed_form_random(medium_grid, rng):
    for _ in range(20):
        f = random_function(medium_grid, rng)
        p = float(rng.uniform(1.1, 4.0))
        i0 = int(rng.integers(0, medium_grid.count - 2))
        i1 = int(rng.integers(i0 + 1, medium_grid.count))
        mask = np.zeros(medium_grid.count, dtype=bool)
        mask[i0:i1] = True
        E = CellSet(medium_grid, mask)
        lam = orlicz_average(f, E, power(p))
        oracle = float(np.mean(np.abs(f.values[mask]) ** p) ** (1.0 / p))
        assert lam == pytest.approx(oracle, rel=1e-9)


def test_orlicz_average_validation(medium_grid, rng):
    f = random_function(medium_grid, rng)
    with pytest.raises(TypeError):
        orlicz_average(f, "not-a-set", power(2.0))
    with pytest.raises(ValueError, match="positive measure"):
        orlicz_average(f, CellSet(medium_grid, np.zeros(medium_grid.count, dtype=bool)), power(2.0))
    other = Grid(0.0, 1.0, medium_grid.count)
    with pytest.raises(ValueError, match="different grid"):
        orlicz_average(f, CellSet(other, np.ones(other.count, dtype=bool)), power(2.0))


# ---------------------------------------------------------------------------
# Orlicz maximal operators


def test_orlicz_maximal_power_one_is_plain_maximal(medium_grid, rng):
    f = random_function(medium_grid, rng)
    for policy in (WindowPolicy.DYADIC, WindowPolicy.ALL):
        lhs = orlicz_maximal(f, power(1.0), policy).values
        rhs = one_sided_maximal(f, Direction.FORWARD, 1.0, policy).values
        np.testing.assert_array_equal(lhs, rhs)


def test_orlicz_maximal_matches_scalar_oracle(rng):
    g = Grid(0.0, 0.25, 48)
    f = random_function(g, rng)
    A = power(2.0)
    lib = orlicz_maximal(f, A, WindowPolicy.DYADIC).values
    oracle = np.zeros(g.count)
    padded = np.concatenate([f.values, np.zeros(g.count)])
    for i in range(g.count):
        best = 0.0
        for k in dyadic_lengths(g.count):
            window = padded[i : i + k]
            best = max(best, luxemburg_from_samples(window, np.ones(k), float(k), A))
        oracle[i] = best
    np.testing.assert_allclose(lib, oracle, rtol=1e-8, atol=1e-12)


def test_orlicz_maximal_dominates_plain(medium_grid, rng):
    # by Jensen, the power(2) Luxemburg average dominates the plain mean
    f = random_function(medium_grid, rng)
    plain = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.DYADIC).values
    luxe = orlicz_maximal(f, power(2.0), WindowPolicy.DYADIC).values
    assert np.all(luxe >= plain * (1 - 1e-8))


def test_fractional_orlicz_maximal_power_one_oracle(rng):
    g = Grid(0.0, 0.125, 64)
    f = random_function(g, rng, signed=False)
    alpha = 0.5
    lib = fractional_orlicz_maximal(f, alpha, power(1.0)).values
    padded = np.concatenate([np.abs(f.values), np.zeros(g.count)])
    oracle = np.zeros(g.count)
    for i in range(g.count):
        best = 0.0
        for k in dyadic_lengths(g.count):
            mean = float(padded[i : i + k].mean())
            best = max(best, (k * g.spacing) ** alpha * mean)
        oracle[i] = best
    np.testing.assert_allclose(lib, oracle, rtol=1e-12)


def test_fractional_orlicz_maximal_general_young(rng):
    g = Grid(0.0, 0.25, 32)
    f = random_function(g, rng)
    A = power(2.0)
    lib = fractional_orlicz_maximal(f, 0.25, A).values
    padded = np.concatenate([f.values, np.zeros(g.count)])
    oracle = np.zeros(g.count)
    for i in range(g.count):
        best = 0.0
        for k in dyadic_lengths(g.count):
            lam = luxemburg_from_samples(padded[i : i + k], np.ones(k), float(k), A)
            best = max(best, (k * g.spacing) ** 0.25 * lam)
        oracle[i] = best
    np.testing.assert_allclose(lib, oracle, rtol=1e-8, atol=1e-12)


def test_fractional_orlicz_maximal_validation(unit_grid):
    f = unit_grid.constant(1.0)
    for alpha in (0.0, 1.0, -0.5):
        with pytest.raises(ValueError, match="alpha"):
            fractional_orlicz_maximal(f, alpha, power(1.0))


# ---------------------------------------------------------------------------
# conjugate pairs and Hoelder


def test_default_conjugate_pairs_roster():
    pairs = default_conjugate_pairs()
    assert len(pairs) == 5
    fams = [(p.A.family, p.conj.family) for p in pairs]
    assert ("power_log", "exp_root") in fams


def test_conjugate_sandwich_power_dual():
    # for exact power duals the inverse product is exactly t
    pair = ConjugatePair(power(2.0), power(2.0))
    res = conjugate_check(pair, np.geomspace(1.0, 1e4, 50))
    assert res["min_ratio"] == pytest.approx(1.0, abs=1e-8)
    assert res["max_ratio"] == pytest.approx(1.0, abs=1e-8)


def test_conjugate_sandwich_default_pairs():
    tgrid = np.geomspace(1.0, 1e4, 60)
    for pair in default_conjugate_pairs():
        res = conjugate_check(pair, tgrid)
        assert res["min_ratio"] >= 1.0 - 1e-6, res["pair"]
        assert res["max_ratio"] <= 2.0 + 1e-6, res["pair"]


def test_conjugate_check_validation():
    pair = ConjugatePair(power(2.0), power(2.0))
    with pytest.raises(ValueError, match="positive"):
        conjugate_check(pair, np.array([0.0, 1.0]))


def test_generalized_holder_bound(medium_grid, rng):
    f = random_function(medium_grid, rng)
    g2 = random_function(medium_grid, rng)
    E = IntervalSpec(-1.0, 1.0)
    res = generalized_holder_check([f, g2], [power(2.0), power(2.0)], E)
    # two-factor Hoelder with dual powers: plain average <= 2 * norm product
    assert res["ratio"] <= 2.0 + 1e-9
    assert res["sweep_max"] == pytest.approx(1.0, rel=1e-9)


def test_generalized_holder_rejects_incompatible(medium_grid, rng):
    f = random_function(medium_grid, rng)
    g2 = random_function(medium_grid, rng)
    with pytest.raises(ValueError, match="not Hoelder-compatible"):
        generalized_holder_check(
            [f, g2], [power(1.5), power(1.5)], IntervalSpec(-1.0, 1.0)
        )


def test_generalized_holder_validation(medium_grid, rng):
    f = random_function(medium_grid, rng)
    with pytest.raises(ValueError, match="at least two"):
        generalized_holder_check([f], [power(2.0)], IntervalSpec(-1.0, 1.0))
