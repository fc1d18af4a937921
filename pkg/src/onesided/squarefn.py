"""Forward square functions built from rolling averages.

``rolling_average(f, s)`` is the exact mean of ``f`` over ``(x, x + s)`` at
every cell's left boundary (partial cells weighted by overlap).  Windows
overhanging the right edge continue with the last cell's value, so
constants are preserved exactly at every point while right-vanishing
inputs read zeros there.  The square function aggregates the jumps between
consecutive dyadic scales; the oscillation variant replaces each jump by
the worst intermediate scale, so it dominates the square function with the
scale range shifted up by one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, SampledFunction

__all__ = [
    "DyadicRange",
    "default_range",
    "rolling_average",
    "square_function",
    "oscillation_operator",
]


@dataclass(frozen=True)
class DyadicRange:
    """Scale exponents ``n_min .. n_max`` (inclusive): windows ``2**n``."""

    n_min: int
    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < self.n_min:
            raise ValueError(f"empty range [{self.n_min}, {self.n_max}]")

    def exponents(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def shifted(self, by: int = 1) -> "DyadicRange":
        return DyadicRange(self.n_min + by, self.n_max + by)

    def validate(self, grid: Grid) -> None:
        if 2.0**self.n_min < grid.spacing * (1.0 - 1e-9):
            raise ValueError(
                f"smallest window 2**{self.n_min} is below one cell ({grid.spacing})"
            )
        if 2.0**self.n_max > grid.extent * (1.0 + 1e-9):
            raise ValueError(
                f"largest window 2**{self.n_max} exceeds the grid extent ({grid.extent})"
            )


def default_range(grid: Grid) -> DyadicRange:
    """From one cell up to the grid extent."""
    lo = math.ceil(math.log2(grid.spacing) - 1e-9)
    hi = math.floor(math.log2(grid.extent) + 1e-9)
    return DyadicRange(lo, hi)


def rolling_average(f: SampledFunction, s: float) -> SampledFunction:
    """Exact mean of ``f`` over ``(x, x + s)`` at each cell's left boundary.

    ``s`` may be any positive length; a window overhanging the right edge
    continues with the last cell's value (constants stay exact, compactly
    supported inputs read zeros) and keeps the full ``s`` denominator.
    """
    if not (s > 0.0 and math.isfinite(s)):
        raise ValueError(f"window length must be positive and finite, got {s}")
    g = f.grid
    n = g.count
    t = s / g.spacing
    q = int(math.floor(t + 1e-12))
    r = t - q
    if r < 1e-12 or r > 1.0 - 1e-12:
        # snap to a whole number of cells
        q = int(round(t))
        r = 0.0
    P = np.empty(n + 1)
    P[0] = 0.0
    np.cumsum(f.values, out=P[1:])
    pad = max(q + 1, 1)
    tail = float(f.values[-1])
    Pp = np.concatenate([P, P[n] + tail * np.arange(1, pad + 1)])
    vp = np.concatenate([f.values, np.full(pad, tail)])
    idx = np.arange(n)
    mass = (Pp[idx + q] - P[idx]) + r * vp[idx + q]  # cells, then the partial piece
    return f.with_values(mass / t)


def square_function(f: SampledFunction, scales: DyadicRange) -> SampledFunction:
    """Root of summed squared jumps between consecutive dyadic averages.

    The jump at scale ``n`` compares windows ``2**n`` and ``2**(n-1)``; the
    half-scale below ``n_min`` may be sub-cell, where the rolling average at
    a left boundary is simply the cell value.
    """
    scales.validate(f.grid)
    total = np.zeros(f.grid.count)
    prev = rolling_average(f, 2.0 ** (scales.n_min - 1)).values
    for n in scales.exponents():
        cur = rolling_average(f, 2.0**n).values
        total += (cur - prev) ** 2
        prev = cur
    return f.with_values(np.sqrt(total))


def _scale_samples(n: int, spacing: float, per_scale: int) -> np.ndarray:
    """Sample lengths in ``[2**n, 2**(n+1)]``: all cell-aligned values plus a
    nested dyadic refinement with at least ``per_scale`` points."""
    lo, hi = 2.0**n, 2.0 ** (n + 1)
    aligned = spacing * np.arange(math.ceil(lo / spacing - 1e-9), math.floor(hi / spacing + 1e-9) + 1)
    aligned = aligned[(aligned >= lo * (1 - 1e-12)) & (aligned <= hi * (1 + 1e-12))]
    J = max(1, math.ceil(math.log2(max(per_scale, 2))))
    nested = lo * (1.0 + np.arange(2**J + 1) / 2.0**J)
    return np.unique(np.concatenate([aligned, nested, [lo, hi]]))


def oscillation_operator(
    f: SampledFunction, scales: DyadicRange, per_scale_samples: int = 8
) -> SampledFunction:
    """Square-type sum with the worst intermediate window per dyadic scale.

    At scale ``n`` the increment is ``sup_s |A(2**n) - A(s)|`` with ``s``
    running over every cell-aligned length in ``[2**n, 2**(n+1)]`` plus a
    nested dyadic refinement of at least ``per_scale_samples`` points
    (growing the sample count never loses points, so the output is monotone
    in it).  Both scale endpoints are always included, which makes the
    output dominate ``square_function`` over the range shifted up by one.
    """
    if per_scale_samples < 2:
        raise ValueError("need at least two samples per scale")
    scales.validate(f.grid)
    g = f.grid
    total = np.zeros(g.count)
    for n in scales.exponents():
        base = rolling_average(f, 2.0**n).values
        worst = np.zeros(g.count)
        for s in _scale_samples(n, g.spacing, per_scale_samples):
            if s <= 0.0:
                continue
            cur = rolling_average(f, float(s)).values
            np.maximum(worst, np.abs(base - cur), out=worst)
        total += worst**2
    return f.with_values(np.sqrt(total))
