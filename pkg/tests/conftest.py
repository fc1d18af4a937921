"""Shared fixtures and oracle helpers for the test suite.

Oracles here are deliberately naive (double loops, brute-force window
enumeration) and share no code with the library paths they check.
"""

from __future__ import annotations

import numpy as np
import pytest

from onesided.grid import Grid, SampledFunction


@pytest.fixture
def unit_grid() -> Grid:
    """A small grid covering [-1, 2) with dyadic spacing."""
    return Grid(-1.0, 0.125, 24)


@pytest.fixture
def medium_grid() -> Grid:
    """A mid-size grid covering [-2, 2) with dyadic spacing."""
    return Grid(-2.0, 2.0**-5, 128)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_function(grid: Grid, rng: np.random.Generator, signed: bool = True) -> SampledFunction:
    lo = -2.0 if signed else 0.0
    return SampledFunction(grid, rng.uniform(lo, 2.0, grid.count))


def naive_forward_maximal(
    values: np.ndarray, delta: float = 1.0, lengths: list[int] | None = None
) -> np.ndarray:
    """Brute-force windowed maximal mean of |values|**delta, zero-extended.

    Pure double loop over anchors and window lengths; windows overrunning
    the right edge read zeros but keep the full-length denominator.
    """
    n = len(values)
    g = np.abs(np.asarray(values, dtype=float)) ** delta
    if lengths is None:
        lengths = list(range(1, n + 1))
    out = np.empty(n)
    for i in range(n):
        best = -np.inf
        for k in lengths:
            total = float(g[i : i + k].sum())  # slice clips at the edge = zeros
            best = max(best, total / k)
        out[i] = best
    return out ** (1.0 / delta)


def naive_sharp_maximal(values: np.ndarray, lengths: list[int]) -> np.ndarray:
    """Brute-force one-sided oscillation: for each admissible window pair,
    mean of the positive part of (value - next-window mean)."""
    n = len(values)
    v = np.asarray(values, dtype=float)
    out = np.zeros(n)
    for i in range(n):
        best = 0.0
        for k in lengths:
            if i + 2 * k > n:
                continue
            c = float(v[i + k : i + 2 * k].mean())
            best = max(best, float(np.clip(v[i : i + k] - c, 0.0, None).mean()))
        out[i] = best
    return out
